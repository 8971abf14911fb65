"""Step measures (the walk) and scenery measures (the colouring).

Both families are queried through cylinder probabilities: ``mu.prob(u)`` for a
step word ``u`` over ``L/H/R`` and ``lam.prob(v)`` for a colour word ``v``.
All measures are immutable and hashable, so they can key caches.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import NamedTuple, Optional

import numpy as np

from ._validation import STEP_SYMBOLS, STEP_VALUES, check_colour_word, check_depth, check_step_word
from .exceptions import ContractError, DepthExceededError, NotSampleableError
from .words import BINARY, ColourAlphabet, mirror, words_of_length

__all__ = [
    "DEFAULT_EPS",
    "StepMeasure",
    "IIDSteps",
    "MarkovSteps",
    "TableSteps",
    "SceneryMeasure",
    "PeriodicOrbitMeasure",
    "IIDScenery",
    "TableScenery",
    "Violation",
    "AsymmetryCheck",
    "step_prob",
    "scenery_prob",
    "is_symmetric",
    "is_strongly_asymmetric",
    "is_straightforward",
    "validate",
    "without_holding",
    "markov_scenery_table",
    "mixture_table",
    "step_measure_from_dict",
    "scenery_measure_from_dict",
]

DEFAULT_EPS = 1e-12
_DEFAULT_VALIDATION_DEPTH = 6


class StepMeasure:
    """Stationary law of the step sequence."""

    kind = "abstract"
    max_depth = None
    sampleable = False

    def prob(self, u):
        raise NotImplementedError

    def sample(self, size, rng):
        raise NotSampleableError(f"step measure of kind {self.kind!r} cannot be sampled")

    @property
    def holding(self):
        return self.prob("H") > 0.0

    def _check_depth(self, u):
        if self.max_depth is not None and len(u) > self.max_depth:
            raise DepthExceededError(u, self.max_depth)


@dataclass(frozen=True)
class IIDSteps(StepMeasure):
    """Independent steps with fixed probabilities of R, L and H."""

    pR: float
    pL: float
    pH: float = 0.0

    kind = "iid"
    sampleable = True

    def __post_init__(self):
        for name in ("pR", "pL", "pH"):
            p = float(getattr(self, name))
            if not 0.0 <= p <= 1.0:
                raise ContractError(f"{name} must lie in [0, 1], got {p}")
            object.__setattr__(self, name, p)
        total = self.pR + self.pL + self.pH
        if abs(total - 1.0) > 1e-9:
            raise ContractError(f"step probabilities must sum to 1, got {total}")

    def _p(self, s):
        return {"R": self.pR, "L": self.pL, "H": self.pH}[s]

    def prob(self, u):
        p = 1.0
        for s in check_step_word(u):
            p *= self._p(s)
        return p

    def sample(self, size, rng):
        values = np.array([STEP_VALUES[s] for s in STEP_SYMBOLS], dtype=np.int64)
        probs = np.array([self._p(s) for s in STEP_SYMBOLS])
        return rng.choice(values, size=size, p=probs / probs.sum())

    def to_dict(self):
        return {"kind": "iid", "pR": self.pR, "pL": self.pL, "pH": self.pH}


def _stationary(P):
    k = P.shape[0]
    if k == 1:
        return np.ones(1)
    if k == 2:
        a, b = P[0, 1], P[1, 0]
        if a + b == 0.0:
            raise ContractError("two-state chain without transitions has no unique stationary law")
        return np.array([b / (a + b), a / (a + b)])
    M = np.vstack([P.T - np.eye(k), np.ones(k)])
    if np.linalg.matrix_rank(M) < k:
        raise ContractError("transition matrix has no unique stationary distribution")
    rhs = np.zeros(k + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    return np.clip(pi, 0.0, None)


@dataclass(frozen=True)
class MarkovSteps(StepMeasure):
    """Stationary Markov chain on (a subset of) the step symbols.

    ``transition`` maps two-letter keys ``"ab"`` to P(next = b | current = a).
    The initial law is the stationary distribution unless ``initial`` is
    given; a non-stationary ``initial`` is reported by :func:`validate`.
    """

    transition: tuple
    initial: Optional[tuple] = None
    states: tuple = field(init=False)
    matrix: np.ndarray = field(init=False, repr=False, compare=False)
    start: np.ndarray = field(init=False, repr=False, compare=False)

    kind = "markov"
    sampleable = True

    def __post_init__(self):
        trans = dict(self.transition)
        for key in trans:
            if len(key) != 2:
                raise ContractError(f"transition key {key!r} must have two step letters")
            check_step_word(key)
        states = tuple(s for s in STEP_SYMBOLS if any(s in key for key in trans))
        idx = {s: i for i, s in enumerate(states)}
        P = np.zeros((len(states), len(states)))
        for key, p in trans.items():
            P[idx[key[0]], idx[key[1]]] = float(p)
        if np.any(P < 0) or np.any(P > 1):
            raise ContractError("transition probabilities must lie in [0, 1]")
        rows = P.sum(axis=1)
        if np.any(np.abs(rows - 1.0) > 1e-9):
            raise ContractError(f"transition rows must sum to 1, got {dict(zip(states, rows))}")
        if self.initial is None:
            start = _stationary(P)
        else:
            init = dict(self.initial)
            start = np.array([float(init.get(s, 0.0)) for s in states])
        object.__setattr__(self, "transition", tuple(sorted(trans.items())))
        if self.initial is not None:
            object.__setattr__(self, "initial", tuple(sorted(dict(self.initial).items())))
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "matrix", P)
        object.__setattr__(self, "start", start)

    @classmethod
    def from_mapping(cls, transition, initial=None):
        return cls(tuple(transition.items()), None if initial is None else tuple(initial.items()))

    @classmethod
    def two_state(cls, p_rr, p_ll):
        """The R/L chain with P(R -> R) = p_rr and P(L -> L) = p_ll."""
        return cls.from_mapping(
            {"RR": p_rr, "RL": 1.0 - p_rr, "LL": p_ll, "LR": 1.0 - p_ll}
        )

    def stationary(self):
        return dict(zip(self.states, _stationary(self.matrix)))

    def prob(self, u):
        u = check_step_word(u)
        if not u:
            return 1.0
        idx = {s: i for i, s in enumerate(self.states)}
        if any(s not in idx for s in u):
            return 0.0
        p = float(self.start[idx[u[0]]])
        for a, b in zip(u, u[1:]):
            p *= self.matrix[idx[a], idx[b]]
        return float(p)

    def sample(self, size, rng):
        values = np.array([STEP_VALUES[s] for s in self.states], dtype=np.int64)
        cum = np.cumsum(self.matrix, axis=1)
        cum[:, -1] = 1.0
        draws = rng.random(size)
        out = np.empty(size, dtype=np.int64)
        if size == 0:
            return out
        state = int(np.searchsorted(np.cumsum(self.start) / self.start.sum(), draws[0], side="right"))
        state = min(state, len(self.states) - 1)
        out[0] = state
        for i in range(1, size):
            state = int(np.searchsorted(cum[state], draws[i], side="right"))
            out[i] = state
        return values[out]

    def to_dict(self):
        d = {"kind": "markov", "transition": dict(self.transition)}
        if self.initial is not None:
            d["initial"] = dict(self.initial)
        return d


@dataclass(frozen=True, eq=False)
class TableSteps(StepMeasure):
    """Step measure given by an explicit table of word probabilities.

    Words up to ``max_depth`` that are missing from the table have
    probability zero; the empty word has probability one unless listed.
    """

    table: dict
    max_depth: int

    kind = "table"

    def __post_init__(self):
        check_depth(self.max_depth, "max_depth", minimum=0)
        for u in self.table:
            check_step_word(u)

    def prob(self, u):
        u = check_step_word(u)
        self._check_depth(u)
        if not u:
            return float(self.table.get("", 1.0))
        return float(self.table.get(u, 0.0))

    def to_dict(self):
        return {"kind": "table", "max_depth": self.max_depth, "probs": dict(self.table)}


class SceneryMeasure:
    """Shift-invariant law of the scenery, queried by cylinder probability."""

    kind = "abstract"
    max_depth = None
    alphabet = BINARY

    def prob(self, v):
        raise NotImplementedError

    def _check(self, v):
        v = check_colour_word(v, self.alphabet)
        if self.max_depth is not None and len(v) > self.max_depth:
            raise DepthExceededError(v, self.max_depth)
        return v


@dataclass(frozen=True)
class PeriodicOrbitMeasure(SceneryMeasure):
    """Uniform measure on the shifts of the periodic sequence ``...www...``."""

    word: str
    alphabet: ColourAlphabet = None

    kind = "periodic"

    def __post_init__(self):
        if not self.word:
            raise ContractError("periodic scenery word must be nonempty")
        if self.alphabet is None:
            object.__setattr__(self, "alphabet", ColourAlphabet.from_words(self.word))
        check_colour_word(self.word, self.alphabet)

    def count(self, v):
        """Number of shifts ``k`` in ``0..period-1`` whose sequence starts with ``v``."""
        v = self._check(v)
        p = len(self.word)
        ext = self.word * (len(v) // p + 2)
        return sum(ext[k : k + len(v)] == v for k in range(p))

    def exact_prob(self, v):
        return Fraction(self.count(v), len(self.word))

    def prob(self, v):
        return self.count(v) / len(self.word)

    def to_dict(self):
        return {"kind": "periodic", "word": self.word}


@dataclass(frozen=True)
class IIDScenery(SceneryMeasure):
    """Independent colours; ``probs`` holds (colour, probability) pairs."""

    probs: tuple
    alphabet: ColourAlphabet = None

    kind = "iid"

    def __post_init__(self):
        probs = dict(self.probs)
        if self.alphabet is None:
            object.__setattr__(self, "alphabet", ColourAlphabet.from_words(*probs))
        total = sum(probs.values())
        if abs(total - 1.0) > 1e-9 or any(p < 0 for p in probs.values()):
            raise ContractError(f"colour probabilities must be a distribution, got {probs}")
        object.__setattr__(self, "probs", tuple(sorted(probs.items())))

    @classmethod
    def uniform(cls, alphabet=BINARY):
        return cls(tuple((s, 1.0 / len(alphabet)) for s in alphabet.symbols), alphabet)

    def prob(self, v):
        probs = dict(self.probs)
        p = 1.0
        for c in self._check(v):
            p *= probs.get(c, 0.0)
        return p

    def to_dict(self):
        return {"kind": "iid", "probs": dict(self.probs)}


@dataclass(frozen=True, eq=False)
class TableScenery(SceneryMeasure):
    """Scenery measure given by an explicit table of cylinder probabilities."""

    table: dict
    max_depth: int
    alphabet: ColourAlphabet = BINARY

    kind = "table"

    def __post_init__(self):
        check_depth(self.max_depth, "max_depth", minimum=0)
        for v in self.table:
            check_colour_word(v, self.alphabet)

    def prob(self, v):
        v = self._check(v)
        if not v:
            return float(self.table.get("", 1.0))
        return float(self.table.get(v, 0.0))

    def to_dict(self):
        return {
            "kind": "table",
            "max_depth": self.max_depth,
            "alphabet": "".join(self.alphabet.symbols),
            "probs": dict(self.table),
        }


def markov_scenery_table(transition, alphabet=BINARY, depth=6, initial=None):
    """Tabulate a stationary Markov colouring up to ``depth``.

    ``transition`` is a square array indexed by the alphabet order.
    """
    P = np.asarray(transition, dtype=float)
    pi = _stationary(P) if initial is None else np.asarray(initial, dtype=float)
    idx = {s: i for i, s in enumerate(alphabet.symbols)}
    table = {}
    for k in range(1, depth + 1):
        for v in words_of_length(alphabet, k):
            p = pi[idx[v[0]]]
            for a, b in zip(v, v[1:]):
                p *= P[idx[a], idx[b]]
            table[v] = float(p)
    return TableScenery(table, depth, alphabet)


def mixture_table(measures, weights, depth):
    """Tabulate the convex combination of scenery measures up to ``depth``."""
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
        raise ContractError("mixture weights must form a probability vector")
    alphabet = measures[0].alphabet
    table = {}
    for k in range(1, depth + 1):
        for v in words_of_length(alphabet, k):
            table[v] = float(sum(w * m.prob(v) for w, m in zip(weights, measures)))
    return TableScenery(table, depth, alphabet)


def step_prob(mu, u):
    return mu.prob(u)


def scenery_prob(lam, v):
    return lam.prob(v)


def _step_words(k):
    return ["".join(t) for t in product(STEP_SYMBOLS, repeat=k)]


def is_symmetric(mu, depth, eps=DEFAULT_EPS):
    """True iff ``mu[u] == mu[mirror(u)]`` for every step word up to ``depth``."""
    depth = check_depth(depth)
    for k in range(1, depth + 1):
        for u in _step_words(k):
            if abs(mu.prob(u) - mu.prob(mirror(u))) > eps:
                return False
    return True


class AsymmetryCheck(NamedTuple):
    ok: bool
    witness: Optional[int]

    def __bool__(self):
        return self.ok


def is_strongly_asymmetric(mu, depth, eps=DEFAULT_EPS):
    """Check ``mu[R^N] != mu[L^N]`` for N = 1..depth.

    Returns an :class:`AsymmetryCheck`; on failure ``witness`` is the
    smallest offending ``N``.
    """
    depth = check_depth(depth)
    for N in range(1, depth + 1):
        if abs(mu.prob("R" * N) - mu.prob("L" * N)) <= eps:
            return AsymmetryCheck(False, N)
    return AsymmetryCheck(True, None)


def is_straightforward(mu, depth, eps=DEFAULT_EPS):
    depth = check_depth(depth)
    return all(mu.prob("R" * N) > eps for N in range(1, depth + 1))


class Violation(NamedTuple):
    check: str
    word: str
    magnitude: float

    @property
    def depth(self):
        return len(self.word)


def _validation_depth(measure, depth):
    if depth is not None:
        return depth
    if measure.max_depth is not None:
        return measure.max_depth
    return _DEFAULT_VALIDATION_DEPTH


def validate(measure, depth=None, tol=DEFAULT_EPS):
    """List the invariant violations of a step or scenery measure.

    Checks the probability range, normalisation of the empty word,
    right-additivity and stationarity (left-additivity) for all words short
    enough that their one-letter extensions are still queryable.
    """
    depth = _validation_depth(measure, depth)
    if isinstance(measure, StepMeasure):
        letters = STEP_SYMBOLS
        words = lambda k: _step_words(k)  # noqa: E731
    else:
        letters = measure.alphabet.symbols
        words = lambda k: words_of_length(measure.alphabet, k)  # noqa: E731

    out = []
    empty = measure.prob("")
    if abs(empty - 1.0) > tol:
        out.append(Violation("normalisation", "", abs(empty - 1.0)))
    for k in range(0, depth + 1):
        for u in words(k):
            p = measure.prob(u)
            if p < -tol or p > 1.0 + tol:
                out.append(Violation("range", u, max(-p, p - 1.0)))
            if k == depth:
                continue
            right = sum(measure.prob(u + s) for s in letters)
            if abs(right - p) > tol:
                out.append(Violation("additivity", u, abs(right - p)))
            left = sum(measure.prob(s + u) for s in letters)
            if abs(left - p) > tol:
                out.append(Violation("stationarity", u, abs(left - p)))
    if isinstance(measure, MarkovSteps) and measure.initial is not None:
        drift = measure.start @ measure.matrix - measure.start
        gap = float(np.max(np.abs(drift)))
        if gap > tol:
            out.append(Violation("stationary-initial", "", gap))
    return out


def without_holding(mu):
    """The no-holding counterpart of ``mu``: holding mass returned to R and L.

    For i.i.d. steps the R/L probabilities are renormalised; for a Markov
    chain the H state is removed and rows renormalised.
    """
    if isinstance(mu, IIDSteps):
        s = mu.pR + mu.pL
        if s == 0.0:
            raise ContractError("pure holding walk has no no-holding counterpart")
        return IIDSteps(mu.pR / s, mu.pL / s, 0.0)
    if isinstance(mu, MarkovSteps):
        trans = {k: v for k, v in mu.transition if "H" not in k}
        rows = {}
        for k, v in trans.items():
            rows[k[0]] = rows.get(k[0], 0.0) + v
        return MarkovSteps.from_mapping({k: v / rows[k[0]] for k, v in trans.items()})
    raise ContractError(f"no holding-free counterpart defined for {mu.kind!r} measures")


def step_measure_from_dict(d):
    kind = d.get("kind")
    if kind == "iid":
        return IIDSteps(d.get("pR", 0.0), d.get("pL", 0.0), d.get("pH", 0.0))
    if kind == "markov":
        return MarkovSteps.from_mapping(d["transition"], d.get("initial"))
    if kind in ("table", "explicit-table"):
        return TableSteps(dict(d["probs"]), int(d["max_depth"]))
    raise ContractError(f"unknown step measure kind {kind!r}")


def scenery_measure_from_dict(d):
    kind = d.get("kind")
    alphabet = ColourAlphabet(tuple(d["alphabet"])) if "alphabet" in d else None
    if kind in ("periodic", "periodic-orbit"):
        return PeriodicOrbitMeasure(d["word"], alphabet)
    if kind == "iid":
        return IIDScenery(tuple(d["probs"].items()), alphabet)
    if kind in ("table", "explicit-table"):
        return TableScenery(dict(d["probs"]), int(d["max_depth"]), alphabet or BINARY)
    raise ContractError(f"unknown scenery measure kind {kind!r}")
