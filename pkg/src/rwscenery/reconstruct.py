"""Recovering scenery cylinders from record cylinders.

``build_matrix`` produces the matrix A_n with ``V_n(rho) = A_n V_n(lambda)``.
Its rows and columns follow the palindrome-first word order, which makes it
block lower triangular with 1x1 blocks at palindromes and 2x2 blocks at
reversal pairs, so the system is solved by block forward substitution.
"""

import csv
import io
import json
from dataclasses import dataclass, field
from itertools import product
from typing import NamedTuple

import numpy as np

from ._validation import check_depth
from .exceptions import ContractError, SingularSystemError
from .measures import DEFAULT_EPS, is_symmetric
from .record import CylinderVector, walk_words
from .words import BINARY, canonical_order, reverse

__all__ = [
    "Block",
    "ReconMatrix",
    "SymmetrizedVector",
    "StructureReport",
    "build_matrix",
    "verify_structure",
    "compare_holding",
    "solve_asymmetric",
    "symmetrize",
    "symmetric_matrix",
    "solve_symmetric",
    "residual",
]


class Block(NamedTuple):
    """A diagonal block: positions ``start .. start + size - 1``, walk length ``N``."""

    start: int
    size: int
    N: int

    @property
    def stop(self):
        return self.start + self.size

    @property
    def kind(self):
        return "palindrome" if self.size == 1 else "pair"


def _blocks(order):
    return [Block(b[0], len(b), len(order.entries[b[0]]) - 1) for b in order.blocks()]


@dataclass(frozen=True, eq=False)
class ReconMatrix:
    order: object
    entries: np.ndarray
    blocks: list
    holding: bool = False
    effective_rank: int = field(default=None)

    def __post_init__(self):
        if self.effective_rank is None:
            object.__setattr__(self, "effective_rank", len(self.order))

    def block_of(self):
        """Map each position to the block containing it."""
        owner = np.empty(len(self.order), dtype=np.int64)
        for j, b in enumerate(self.blocks):
            owner[b.start : b.stop] = j
        return owner

    def to_csv(self, fh=None):
        """Nonzero entries as ``row,col,value`` with words as row/column labels."""
        buf = io.StringIO() if fh is None else fh
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["row", "col", "value"])
        words = self.order.entries
        for i, j in zip(*np.nonzero(self.entries)):
            writer.writerow([words[i], words[j], repr(float(self.entries[i, j]))])
        return buf.getvalue() if fh is None else None

    def to_json(self):
        return json.dumps(
            {
                "depth": self.order.depth,
                "alphabet": "".join(self.order.alphabet.symbols),
                "size": len(self.order),
                "holding": self.holding,
                "effective_rank": self.effective_rank,
                "blocks": [
                    {
                        "kind": b.kind,
                        "words": list(self.order.entries[b.start : b.stop]),
                        "indices": list(range(b.start, b.stop)),
                        "N": b.N,
                        "values": self.entries[b.start : b.stop, b.start : b.stop].tolist(),
                    }
                    for b in self.blocks
                ],
            },
            indent=2,
        )


class SymmetrizedVector(CylinderVector):
    """Cylinder vector invariant under word reversal."""

    tag = "reversal-symmetrized"


def build_matrix(mu, n, alphabet=BINARY):
    """A_n: entry (w, v) sums ``mu[u]`` over walks u reading w off a colouring v.

    Rows are filled by enumerating, for each walk word u, all colourings of
    the interval it visits; each colouring ``v`` determines exactly one
    consistent record word ``w``.
    """
    n = check_depth(n)
    order = canonical_order(alphabet, n)
    index = order.index
    A = np.zeros((len(order), len(order)))
    for N in range(n):
        for u, p, pos in walk_words(mu, N):
            lo = min(pos)
            offsets = [q - lo for q in pos]
            for colouring in product(alphabet.symbols, repeat=max(pos) - lo + 1):
                v = "".join(colouring)
                w = "".join(colouring[o] for o in offsets)
                A[index[w], index[v]] += p
    return ReconMatrix(order, A, _blocks(order), holding=bool(mu.prob("H") > 0.0))


class StructureReport(NamedTuple):
    violations: list
    nonzeros: int

    @property
    def ok(self):
        return not self.violations


def _expected_block(mu, b):
    if b.N == 0:
        return np.eye(b.size)
    r, l = mu.prob("R" * b.N), mu.prob("L" * b.N)
    if b.size == 1:
        return np.array([[r + l]])
    return np.array([[r, l], [l, r]])


def _range_distribution(mu, N):
    """Law of the number of sites visited by the first N steps."""
    out = {}
    for _, p, pos in walk_words(mu, N):
        size = max(pos) - min(pos) + 1
        out[size] = out.get(size, 0.0) + p
    return out


def verify_structure(A, mu, tol=DEFAULT_EPS, reference=None):
    """Check A_n against its expected block structure; violations are returned, not raised.

    Checked: nonnegativity, zeros to the right of every diagonal block,
    zeros among same-length columns other than ``w`` and ``reverse(w)``,
    the closed-form diagonal blocks, and the column sums: restricted to the
    rows of length k, column v sums to the probability that a walk of k - 1
    steps visits exactly ``len(v)`` sites. With ``reference``
    (the matrix of a holding-free variant) every entry that is zero there
    but nonzero here must lie strictly left of its row's diagonal block.
    Each violation is ``(check, row_word, col_word, magnitude)``.
    """
    E = A.entries
    words = A.order.entries
    out = []
    neg = np.argwhere(E < -tol)
    out += [("negative", words[i], words[j], float(-E[i, j])) for i, j in neg]
    for b in A.blocks:
        rows = slice(b.start, b.stop)
        upper = E[rows, b.stop :]
        for i, j in np.argwhere(np.abs(upper) > tol):
            out.append(("above-block", words[b.start + i], words[b.stop + j], float(upper[i, j])))
        got = E[rows, rows]
        want = _expected_block(mu, b)
        for i, j in np.argwhere(np.abs(got - want) > tol):
            out.append(
                ("block-value", words[b.start + i], words[b.start + j], float(abs(got[i, j] - want[i, j])))
            )
        seg_lo, _ = A.order.span(b.N + 1)
        same_len = E[rows, seg_lo : b.start]
        for i, j in np.argwhere(np.abs(same_len) > tol):
            out.append(("same-length", words[b.start + i], words[seg_lo + j], float(same_len[i, j])))
    order = A.order
    for k in range(1, order.depth + 1):
        rows = slice(*order.span(k))
        col_sums = E[rows, :].sum(axis=0)
        visits = _range_distribution(mu, k - 1)
        for j, v in enumerate(order.entries):
            want = visits.get(len(v), 0.0)
            if abs(col_sums[j] - want) > 1e-12:
                out.append(("column-sum", f"length {k}", v, float(abs(col_sums[j] - want))))
    if reference is not None:
        out += compare_holding(reference, A, tol).violations
    return StructureReport(out, int(np.count_nonzero(np.abs(E) > tol)))


def compare_holding(plain, holding, tol=DEFAULT_EPS):
    """Report entries that are zero in ``plain`` but nonzero in ``holding``.

    Such entries are only allowed strictly to the left of the row's diagonal
    block. ``nonzeros`` counts the newly nonzero entries.
    """
    if plain.order != holding.order:
        raise ContractError("matrices must share a word order")
    words = plain.order.entries
    new = (np.abs(plain.entries) <= tol) & (np.abs(holding.entries) > tol)
    owner = plain.block_of()
    out = []
    for i, j in np.argwhere(new):
        if j >= plain.blocks[owner[i]].start:
            out.append(("holding-new-entry", words[i], words[j], float(holding.entries[i, j])))
    return StructureReport(out, int(new.sum()))


def _check_same_order(A, rho):
    if A.order != rho.order:
        raise ContractError("matrix and vector must share the same word order")


def solve_asymmetric(A, rho, eps=DEFAULT_EPS):
    """Block forward substitution for ``A x = rho``.

    Raises :class:`SingularSystemError` naming ``N`` when a 2x2 block has
    ``|mu[R^N] - mu[L^N]| <= eps`` or a palindrome block has
    ``mu[R^N] + mu[L^N] <= eps``.
    """
    _check_same_order(A, rho)
    E = A.entries
    b_vec = rho.values
    x = np.zeros(len(b_vec))
    for b in A.blocks:
        rows = slice(b.start, b.stop)
        if np.any(E[rows, b.stop :] != 0.0):
            raise ContractError(f"matrix is not block lower triangular at block {b}")
        rhs = b_vec[rows] - E[rows, : b.start] @ x[: b.start]
        D = E[rows, rows]
        if b.size == 1:
            if D[0, 0] <= eps:
                raise SingularSystemError(b.N, f"palindrome block value {D[0, 0]:.3g}")
            x[b.start] = rhs[0] / D[0, 0]
        else:
            r, l = D[0, 0], D[0, 1]
            if abs(r - l) <= eps:
                raise SingularSystemError(
                    b.N, f"mu[R^N] = {r:.6g} and mu[L^N] = {l:.6g} are not separated"
                )
            det = D[0, 0] * D[1, 1] - D[0, 1] * D[1, 0]
            x[b.start] = (D[1, 1] * rhs[0] - D[0, 1] * rhs[1]) / det
            x[b.start + 1] = (D[0, 0] * rhs[1] - D[1, 0] * rhs[0]) / det
    return CylinderVector(rho.order, x)


def symmetrize(v):
    """Average every cylinder value with that of the reversed word."""
    order = v.order
    rev = np.array([order.index[reverse(w)] for w in order.entries])
    return SymmetrizedVector(order, 0.5 * (v.values + v.values[rev]))


def _representatives(order):
    return [b.start for b in _blocks(order)]


def symmetric_matrix(mu, n, alphabet=BINARY):
    """Lower triangular matrix acting on reversal-symmetrized vectors.

    Columns of each reversal pair are merged into the column of the first
    member; the second member's column is zero. Both rows of a pair are
    kept, so the matrix has the shape of A_n and its effective rank is the
    number of reversal classes.
    """
    A = build_matrix(mu, n, alphabet)
    S = A.entries.copy()
    for b in A.blocks:
        if b.size == 2:
            S[:, b.start] += S[:, b.start + 1]
            S[:, b.start + 1] = 0.0
    return ReconMatrix(A.order, S, A.blocks, A.holding, effective_rank=len(A.blocks))


def solve_symmetric(mu, rho, eps=DEFAULT_EPS, symmetry_depth=None):
    """Recover the reversal-symmetrized scenery vector from ``rho``.

    Requires a mirror-symmetric step measure. The diagonal entry of the row
    of a word of length N + 1 is ``2 mu[R^N]``; it must exceed ``eps``.
    """
    n = rho.order.depth
    depth = symmetry_depth or max(1, n - 1)
    if not is_symmetric(mu, depth, eps):
        raise ContractError("solve_symmetric needs a mirror-symmetric step measure")
    S = symmetric_matrix(mu, n, rho.order.alphabet)
    E = S.entries
    y = rho.values
    x = np.zeros(len(y))
    for b in S.blocks:
        i = b.start
        d = E[i, i]
        if d <= eps or (b.N > 0 and mu.prob("R" * b.N) <= eps):
            raise SingularSystemError(b.N, "mu[R^N] vanishes (walk is not straightforward)")
        x[i] = (y[i] - E[i, :i] @ x[:i]) / d
        if b.size == 2:
            x[i + 1] = x[i]
    return SymmetrizedVector(rho.order, x)


def residual(A, x, rho):
    """Sup-norm of ``A x - rho``."""
    return float(np.max(np.abs(A.entries @ x.values - rho.values)))
