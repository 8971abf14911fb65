"""The forward map from (step measure, scenery measure) to the record measure.

Walk words are always enumerated depth-first in lexicographic order over
``L < H < R``, skipping prefixes of probability zero; every cylinder value is
accumulated in that order.
"""

import csv
import io
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Optional

import numpy as np

from ._validation import STEP_SYMBOLS, STEP_VALUES, check_colour_word, check_depth, check_step_word
from .exceptions import ContractError, InsufficientDataError
from .words import ColourAlphabet, canonical_order, rotate

__all__ = [
    "CylinderVector",
    "PathPattern",
    "RecordSequence",
    "walk_positions",
    "walk_pattern",
    "walk_words",
    "cylinder_vector",
    "exact_record_vector",
    "record_vector_for_scenery",
    "orbit_average_vector",
    "simulate_record",
    "empirical_cylinders",
    "pooled_cylinders",
    "check_equivariance",
]


@dataclass(frozen=True, eq=False)
class CylinderVector:
    """Cylinder probabilities indexed by a :class:`~rwscenery.words.WordOrder`."""

    order: object
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (len(self.order),):
            raise ContractError(
                f"vector of shape {values.shape} does not match order of length {len(self.order)}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, word):
        return float(self.values[self.order.position(word)])

    def as_dict(self):
        return dict(zip(self.order.entries, self.values.tolist()))

    def length_sums(self):
        """Total mass of the words of each length, keyed by length."""
        return {
            k: float(self.values[slice(*self.order.span(k))].sum())
            for k in range(1, self.order.depth + 1)
        }

    def truncate(self, m):
        order = self.order.truncate(m)
        return type(self)(order, self.values[: len(order)])

    def to_csv(self, fh=None):
        """Write ``word,length,value`` rows in canonical order.

        Returns the CSV text when ``fh`` is None. Values use ``repr`` so they
        round-trip exactly.
        """
        buf = io.StringIO() if fh is None else fh
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["word", "length", "value"])
        for w, v in zip(self.order.entries, self.values.tolist()):
            writer.writerow([w, len(w), repr(float(v))])
        if fh is None:
            return buf.getvalue()
        return None

    @classmethod
    def from_csv(cls, fh, alphabet=None):
        if isinstance(fh, str):
            fh = io.StringIO(fh)
        rows = list(csv.DictReader(fh))
        if not rows:
            raise ContractError("empty cylinder CSV")
        values = {r["word"]: float(r["value"]) for r in rows}
        if alphabet is None:
            alphabet = ColourAlphabet.from_words(*values)
        depth = max(len(w) for w in values)
        order = canonical_order(alphabet, depth)
        missing = [w for w in order.entries if w not in values]
        if missing:
            raise ContractError(f"cylinder CSV misses {len(missing)} words, e.g. {missing[0]!r}")
        return cls(order, np.array([values[w] for w in order.entries]))


@dataclass(frozen=True)
class PathPattern:
    """Sites visited by a walk word and the colours a record word forces on them."""

    span_lo: int
    span_hi: int
    anchored_word: Optional[str]
    consistent: bool = True

    @property
    def span(self):
        return self.span_hi - self.span_lo + 1


@dataclass(frozen=True)
class RecordSequence:
    colours: str
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if len(self.colours) < 1:
            raise ContractError("record sequence must be nonempty")

    def __len__(self):
        return len(self.colours)

    def to_text(self):
        return self.colours + "\n"

    @classmethod
    def from_text(cls, text, **metadata):
        return cls(text.strip(), metadata)


def walk_positions(u):
    """Partial sums ``0, u_1, u_1 + u_2, ...`` of a step word."""
    pos = [0]
    for s in check_step_word(u):
        pos.append(pos[-1] + STEP_VALUES[s])
    return pos


def walk_pattern(u, w):
    """Anchor the record word ``w`` on the sites visited by the walk ``u``.

    Returns a :class:`PathPattern`; when a site is recorded twice with
    different colours the pattern has ``consistent=False`` and no word.
    """
    if len(w) != len(u) + 1:
        raise ContractError(f"record word length {len(w)} must be walk length {len(u)} + 1")
    pos = walk_positions(u)
    lo, hi = min(pos), max(pos)
    forced = {}
    for p, c in zip(pos, w):
        if forced.setdefault(p, c) != c:
            return PathPattern(lo, hi, None, consistent=False)
    return PathPattern(lo, hi, "".join(forced[s] for s in range(lo, hi + 1)))


@lru_cache(maxsize=256)
def _walk_words(mu, N):
    out = []

    def visit(prefix, pos):
        if len(prefix) == N:
            out.append((prefix, mu.prob(prefix), tuple(pos)))
            return
        for s in STEP_SYMBOLS:
            u = prefix + s
            if mu.prob(u) == 0.0:
                continue
            visit(u, pos + [pos[-1] + STEP_VALUES[s]])

    visit("", [0])
    return tuple(out)


def walk_words(mu, N):
    """Walk words of length ``N`` with positive probability, in canonical order.

    Yields ``(u, mu[u], positions)`` triples.
    """
    return _walk_words(mu, N)


def _colourings(alphabet, size):
    return product(alphabet.symbols, repeat=size)


def cylinder_vector(lam, n):
    """The vector V_n of cylinder probabilities of a scenery measure."""
    order = canonical_order(lam.alphabet, check_depth(n))
    return CylinderVector(order, np.array([lam.prob(w) for w in order.entries]))


def exact_record_vector(mu, lam, n):
    """Exact V_n of the global record measure of ``(mu, lam)``.

    For each record length N + 1 the sum runs over walk words u of length N;
    every colouring of the interval visited by u yields one consistent
    record word, weighted by ``mu[u]`` times the (shift-invariant) scenery
    probability of that colouring.
    """
    n = check_depth(n)
    alphabet = lam.alphabet
    order = canonical_order(alphabet, n)
    index = order.index
    rho = np.zeros(len(order))
    lam_cache = {}
    for N in range(n):
        for u, p, pos in walk_words(mu, N):
            lo = min(pos)
            offsets = [q - lo for q in pos]
            for colouring in _colourings(alphabet, max(pos) - lo + 1):
                v = "".join(colouring)
                lv = lam_cache.get(v)
                if lv is None:
                    lv = lam_cache[v] = lam.prob(v)
                if lv == 0.0:
                    continue
                w = "".join(colouring[o] for o in offsets)
                rho[index[w]] += p * lv
    return CylinderVector(order, rho)


def record_vector_for_scenery(mu, x, n, alphabet=None):
    """Exact V_n of the record law of the single periodic scenery with period word ``x``.

    The walker starts at site 0, so ``rho_x[w]`` is the probability that the
    first ``len(w)`` records read ``w``.
    """
    n = check_depth(n)
    if not x:
        raise ContractError("scenery word must be nonempty")
    alphabet = alphabet or ColourAlphabet.from_words(x)
    check_colour_word(x, alphabet)
    order = canonical_order(alphabet, n)
    index = order.index
    q = len(x)
    rho = np.zeros(len(order))
    for N in range(n):
        for u, p, pos in walk_words(mu, N):
            rho[index["".join(x[s % q] for s in pos)]] += p
    return CylinderVector(order, rho)


def orbit_average_vector(mu, x, n, alphabet=None):
    """Average of ``record_vector_for_scenery`` over all shifts of ``x``.

    This is the global record measure of the periodic orbit of ``x``, which
    is also the ergodic limit of sliding-window frequencies along one record.
    """
    vecs = [record_vector_for_scenery(mu, rotate(x, k), n, alphabet) for k in range(len(x))]
    return CylinderVector(vecs[0].order, sum(v.values for v in vecs) / len(x))


def simulate_record(mu, x, T, seed):
    """Record of length ``T`` along a walk drawn from ``mu`` on the periodic scenery ``x``."""
    T = check_depth(T, "T")
    if not x:
        raise ContractError("scenery word must be nonempty")
    rng = np.random.default_rng(seed)
    steps = mu.sample(T - 1, rng)
    pos = np.concatenate(([0], np.cumsum(steps, dtype=np.int64)))
    table = np.frombuffer(x.encode("ascii"), dtype=np.uint8)
    colours = table[np.mod(pos, len(x))].tobytes().decode("ascii")
    meta = {"mu": mu.to_dict() if hasattr(mu, "to_dict") else repr(mu), "scenery": x, "seed": seed}
    return RecordSequence(colours, meta)


def _window_counts(colours, n, alphabet):
    a = len(alphabet)
    lookup = np.full(256, -1, dtype=np.int64)
    for i, s in enumerate(alphabet.symbols):
        lookup[ord(s)] = i
    codes = lookup[np.frombuffer(colours.encode("ascii"), dtype=np.uint8)]
    if np.any(codes < 0):
        raise ContractError("record contains symbols outside the alphabet")
    counts = {}
    rolling = np.zeros(len(codes), dtype=np.int64)
    for k in range(1, n + 1):
        # rolling[i] encodes colours[i:i+k] in base a
        rolling = rolling[: len(codes) - k + 1] * a + codes[k - 1 :]
        counts[k] = np.bincount(rolling, minlength=a**k)
    return counts


def _code(word, alphabet):
    rank = {s: i for i, s in enumerate(alphabet.symbols)}
    c = 0
    for s in word:
        c = c * len(alphabet) + rank[s]
    return c


def _counts_to_vector(counts, totals, order):
    values = np.empty(len(order))
    for i, w in enumerate(order.entries):
        k = len(w)
        values[i] = counts[k][_code(w, order.alphabet)] / totals[k]
    return CylinderVector(order, values)


def empirical_cylinders(rec, n, alphabet=None):
    """Sliding-window frequencies of all words up to length ``n`` in one record."""
    n = check_depth(n)
    colours = rec.colours if isinstance(rec, RecordSequence) else str(rec)
    T = len(colours)
    if T < n:
        raise InsufficientDataError(f"record of length {T} is shorter than depth {n}")
    alphabet = alphabet or ColourAlphabet.from_words(colours)
    counts = _window_counts(colours, n, alphabet)
    totals = {k: T - k + 1 for k in range(1, n + 1)}
    return _counts_to_vector(counts, totals, canonical_order(alphabet, n))


def pooled_cylinders(records, n, alphabet=None):
    """Window frequencies pooled over several independent records."""
    n = check_depth(n)
    seqs = [r.colours if isinstance(r, RecordSequence) else str(r) for r in records]
    if not seqs:
        raise InsufficientDataError("no records to pool")
    if min(len(s) for s in seqs) < n:
        raise InsufficientDataError(f"every record must have length >= {n}")
    alphabet = alphabet or ColourAlphabet.from_words(*seqs)
    counts = {k: 0 for k in range(1, n + 1)}
    totals = {k: 0 for k in range(1, n + 1)}
    for s in seqs:
        c = _window_counts(s, n, alphabet)
        for k in counts:
            counts[k] = counts[k] + c[k]
            totals[k] += len(s) - k + 1
    return _counts_to_vector(counts, totals, canonical_order(alphabet, n))


# -- equivariance of the global recording map ---------------------------------


class _TwoSided:
    """Step sequence indexed by integers: ``future`` at 0.., ``past`` at ..-1."""

    def __init__(self, future, past=""):
        self.future = [STEP_VALUES[s] for s in check_step_word(future)]
        self.past = [STEP_VALUES[s] for s in check_step_word(past)]

    def __getitem__(self, i):
        if i >= 0:
            return self.future[i]
        return self.past[len(self.past) + i]

    def shifted(self):
        out = _TwoSided("")
        out.past = self.past + self.future[:1]
        out.future = self.future[1:]
        return out


def _shift_scenery(scenery, k):
    return lambda j: scenery(j + k)


def _record_by_definition(omega, scenery, n):
    if n == 0:
        return scenery(0)
    if n > 0:
        return _shift_scenery(scenery, sum(omega[i] for i in range(n)))(0)
    return _shift_scenery(scenery, -sum(omega[i] for i in range(n, 0)))(0)


def check_equivariance(omega, x, horizon, past=""):
    """Check that recording commutes with the skew product, on a finite window.

    One side applies the skew product ``(omega, x) -> (shift omega, T^{omega_0} x)``
    and evaluates records straight from their defining formulas; the other
    walks the path once, reads the colour record off the positions and
    shifts that sequence by one. Indices run from ``-len(past) - 1`` to
    ``horizon - 1``.
    """
    horizon = check_depth(horizon, "horizon", minimum=0)
    if len(omega) < horizon + 1:
        raise ContractError("omega must have at least horizon + 1 steps")
    if not x:
        raise ContractError("scenery word must be nonempty")
    q = len(x)
    lo = -len(past) - 1

    two_sided = _TwoSided(omega, past)
    scenery = lambda j: x[j % q]  # noqa: E731
    shifted_omega = two_sided.shifted()
    shifted_scenery = _shift_scenery(scenery, two_sided[0])
    lhs = [_record_by_definition(shifted_omega, shifted_scenery, n) for n in range(lo, horizon)]

    steps = [STEP_VALUES[s] for s in past + omega]
    origin = len(past)
    pos = np.concatenate(([0], np.cumsum(steps))) - sum(STEP_VALUES[s] for s in past)
    # pos[origin + n] is the walker's site at time n
    records = {n: x[int(pos[origin + n]) % q] for n in range(-len(past), len(omega) + 1)}
    rhs = [records[n + 1] for n in range(lo, horizon)]
    return lhs == rhs


def words_by_length(order, k):
    """Convenience: the words of length ``k`` in ``order``."""
    return order.entries[slice(*order.span(k))]

