"""Deciding whether a walk can tell two periodic sceneries apart.

A pair of periodic sceneries is first classified combinatorially (translate,
reflection of a translate, or neither). The verdict is then backed by the
record measures: equivalent pairs must produce identical record cylinders
up to the search depth, and inequivalent pairs are certified by the
shallowest record word whose probability differs.
"""

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .exceptions import ContractError, InconclusiveDepthError, SceneryError, UnsupportedRegimeError
from .measures import (
    PeriodicOrbitMeasure,
    is_straightforward,
    is_strongly_asymmetric,
    is_symmetric,
)
from .record import exact_record_vector
from .words import ColourAlphabet, reverse, rotate

__all__ = [
    "PeriodicScenery",
    "Verdict",
    "ASSUMPTIONS",
    "primitive_root",
    "is_translate",
    "is_equivalent",
    "orbit_measure",
    "regime",
    "record_divergence",
    "distinguish",
]

ASSUMPTIONS = ("ergodic global record measure",)
DEFAULT_TOL = 1e-10


def primitive_root(word):
    """Shortest ``r`` with ``word == r * k`` for some ``k``."""
    p = len(word)
    for d in range(1, p + 1):
        if p % d == 0 and word[:d] * (p // d) == word:
            return word[:d]
    return word


@dataclass(frozen=True)
class PeriodicScenery:
    """A two-sided periodic colouring given by one period word.

    The word is reduced to its primitive root, so ``period`` is the minimal
    period: ``PeriodicScenery("0101").word == "01"``.
    """

    word: str

    def __post_init__(self):
        if not self.word:
            raise ContractError("periodic scenery needs a nonempty word")
        object.__setattr__(self, "word", primitive_root(str(self.word)))

    @property
    def period(self):
        return len(self.word)

    def reflected(self):
        return PeriodicScenery(reverse(self.word))

    def shifted(self, k):
        return PeriodicScenery(rotate(self.word, k))


def _as_scenery(x):
    return x if isinstance(x, PeriodicScenery) else PeriodicScenery(x)


def is_translate(x, y):
    """Shift ``k`` with ``y == T^k x``, or None."""
    x, y = _as_scenery(x), _as_scenery(y)
    if x.period != y.period:
        return None
    for k in range(x.period):
        if rotate(x.word, k) == y.word:
            return k
    return None


def is_equivalent(x, y):
    """``(k, reflected)`` such that y is the k-shift of x or of its reflection, or None."""
    x, y = _as_scenery(x), _as_scenery(y)
    k = is_translate(x, y)
    if k is not None:
        return k, False
    k = is_translate(x.reflected(), y)
    if k is not None:
        return k, True
    return None


def orbit_measure(x):
    return PeriodicOrbitMeasure(_as_scenery(x).word)


@dataclass(frozen=True)
class Verdict:
    relation: str
    regime: str
    shift: Optional[int] = None
    reflected: Optional[bool] = None
    certificate_word: Optional[str] = None
    depth: Optional[int] = None
    divergence: float = 0.0
    values: Optional[tuple] = None
    n_max: Optional[int] = None
    assumptions: tuple = field(default=ASSUMPTIONS)

    def to_dict(self):
        return {
            "relation": self.relation,
            "shift": self.shift,
            "reflected": self.reflected,
            "certificate_word": self.certificate_word,
            "depth": self.depth,
            "divergence": self.divergence,
            "values": list(self.values) if self.values is not None else None,
            "n_max": self.n_max,
            "regime": self.regime,
            "assumptions": list(self.assumptions),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


@lru_cache(maxsize=256)
def regime(mu, n_max):
    """``"asymmetric"`` or ``"symmetric"``; raises for any other walk."""
    depth = max(1, n_max - 1)
    if is_strongly_asymmetric(mu, depth).ok:
        return "asymmetric"
    if is_symmetric(mu, depth) and is_straightforward(mu, depth):
        return "symmetric"
    raise UnsupportedRegimeError(
        "walk is neither strongly asymmetric nor symmetric and straightforward "
        f"up to N={depth}"
    )


@lru_cache(maxsize=1024)
def _record_values(mu, word, alphabet, n):
    return exact_record_vector(mu, PeriodicOrbitMeasure(word, alphabet), n)


def record_divergence(x, y, mu, n, tol=DEFAULT_TOL):
    """Shallowest record word whose probabilities under x and y differ by more than ``tol``.

    Returns ``(word, rho_x, rho_y)`` or None. Both record vectors are global
    record measures of the periodic orbits, computed exactly.
    """
    x, y = _as_scenery(x), _as_scenery(y)
    alphabet = ColourAlphabet.from_words(x.word, y.word)
    rx = _record_values(mu, x.word, alphabet, n)
    ry = _record_values(mu, y.word, alphabet, n)
    diff = np.abs(rx.values - ry.values)
    hits = np.flatnonzero(diff > tol)
    if hits.size == 0:
        return None
    i = int(hits[0])
    w = rx.order.entries[i]
    return w, float(rx.values[i]), float(ry.values[i])


def distinguish(x, y, mu, n_max=None, tol=DEFAULT_TOL):
    """Classify the pair ``(x, y)`` of periodic sceneries for the walk ``mu``.

    Strongly asymmetric walks separate every pair that is not a translate;
    symmetric straightforward walks separate every pair that is not a
    translate or reflected translate. Equivalent pairs are cross-checked to
    have identical record cylinders up to ``n_max`` (default: sum of the
    periods). Inequivalent pairs get the shallowest diverging record word
    as certificate, or :class:`InconclusiveDepthError` if none is found.
    """
    x, y = _as_scenery(x), _as_scenery(y)
    if n_max is None:
        n_max = x.period + y.period
    mode = regime(mu, n_max)

    if mode == "asymmetric":
        k = is_translate(x, y)
        relation = None if k is None else "translate"
        reflected = None if k is None else False
    else:
        eq = is_equivalent(x, y)
        k, reflected = eq if eq is not None else (None, None)
        relation = None if eq is None else ("reflection-equivalent" if reflected else "translate")

    found = record_divergence(x, y, mu, n_max, tol)
    if relation is not None:
        if found is not None:
            raise SceneryError(
                f"{relation} pair {x.word!r}, {y.word!r} has diverging records at {found[0]!r}"
            )
        return Verdict(relation, mode, shift=k, reflected=reflected, n_max=n_max)

    if found is None:
        raise InconclusiveDepthError(n_max, f"{x.word!r} vs {y.word!r}")
    w, a, b = found
    return Verdict(
        "distinguishable",
        mode,
        certificate_word=w,
        depth=len(w),
        divergence=abs(a - b),
        values=(a, b),
        n_max=n_max,
    )
