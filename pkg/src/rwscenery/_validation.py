"""Small argument checkers used across the package."""

import numbers

from .exceptions import ContractError, InvalidDepthError

STEP_SYMBOLS = ("L", "H", "R")
STEP_VALUES = {"L": -1, "H": 0, "R": 1}


def check_depth(n, name="depth", minimum=1):
    if isinstance(n, bool) or not isinstance(n, numbers.Integral):
        raise InvalidDepthError(f"{name} must be an integer, got {n!r}")
    if n < minimum:
        raise InvalidDepthError(f"{name} must be >= {minimum}, got {n}")
    return int(n)


def check_probability(p, name="probability", atol=1e-12):
    p = float(p)
    if not (-atol <= p <= 1.0 + atol):
        raise ContractError(f"{name} must lie in [0, 1], got {p}")
    return p


def check_step_word(u):
    u = str(u)
    bad = set(u) - set(STEP_SYMBOLS)
    if bad:
        raise ContractError(f"step word {u!r} contains symbols outside L/H/R: {sorted(bad)}")
    return u


def check_colour_word(w, alphabet):
    w = str(w)
    bad = set(w) - set(alphabet.symbols)
    if bad:
        raise ContractError(
            f"colour word {w!r} uses symbols {sorted(bad)} outside alphabet {alphabet.symbols}"
        )
    return w
