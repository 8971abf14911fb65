"""Alphabets, finite words and the palindrome-first word ordering.

Colour words and step words are plain strings. Step words use the letters
``L``, ``H`` and ``R`` for the steps -1, 0 and +1.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

from ._validation import STEP_SYMBOLS, STEP_VALUES, check_depth, check_step_word
from .exceptions import ContractError

__all__ = [
    "ColourAlphabet",
    "BINARY",
    "WordOrder",
    "STEP_SYMBOLS",
    "STEP_VALUES",
    "reverse",
    "mirror",
    "is_palindrome",
    "rotate",
    "words_of_length",
    "canonical_order",
    "step_values",
]

_MIRROR = str.maketrans("RL", "LR")


@dataclass(frozen=True)
class ColourAlphabet:
    """An ordered set of single-character colour symbols."""

    symbols: tuple = ("0", "1")

    def __post_init__(self):
        symbols = tuple(str(s) for s in self.symbols)
        if not symbols:
            raise ContractError("colour alphabet must be nonempty")
        if len(set(symbols)) != len(symbols):
            raise ContractError(f"colour symbols must be distinct: {symbols}")
        if any(len(s) != 1 for s in symbols):
            raise ContractError(f"colour symbols must be single characters: {symbols}")
        object.__setattr__(self, "symbols", symbols)

    def __len__(self):
        return len(self.symbols)

    def __contains__(self, symbol):
        return symbol in self.symbols

    @classmethod
    def from_words(cls, *words):
        """Smallest alphabet covering ``words``; binary when they only use 0/1."""
        used = set("".join(words))
        if used <= {"0", "1"}:
            return BINARY
        return cls(tuple(sorted(used)))


BINARY = ColourAlphabet(("0", "1"))


def reverse(w):
    return w[::-1]


def mirror(u):
    """Swap R and L in a step word, leaving H in place."""
    return check_step_word(u).translate(_MIRROR)


def is_palindrome(w):
    return w == w[::-1]


def rotate(w, k):
    """Period word of ``T^k x`` when ``w`` is the period word of ``x``."""
    if not w:
        return w
    k %= len(w)
    return w[k:] + w[:k]


def step_values(u):
    return [STEP_VALUES[s] for s in check_step_word(u)]


def words_of_length(alphabet, k):
    """All words of length ``k`` in lexicographic order of the alphabet."""
    return ["".join(t) for t in product(alphabet.symbols, repeat=k)]


@dataclass(frozen=True)
class WordOrder:
    """Canonical ordering of all colour words of length 1..depth.

    Within each length the palindromes come first, in lexicographic order,
    followed by the non-palindromes as adjacent pairs ``(w, reverse(w))``
    sorted by their lexicographically smaller member.
    """

    alphabet: ColourAlphabet
    depth: int
    entries: tuple
    index: dict = field(repr=False, compare=False)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def position(self, word):
        try:
            return self.index[word]
        except KeyError:
            raise KeyError(f"word {word!r} is not in the order of depth {self.depth}") from None

    def blocks(self):
        """Diagonal blocks as tuples of positions: ``(i,)`` or ``(i, i + 1)``."""
        out = []
        i = 0
        while i < len(self.entries):
            w = self.entries[i]
            if is_palindrome(w):
                out.append((i,))
                i += 1
            else:
                out.append((i, i + 1))
                i += 2
        return out

    def span(self, k):
        """Half-open position range holding the words of length ``k``."""
        a = len(self.alphabet)
        start = sum(a**j for j in range(1, k))
        return start, start + a**k

    def truncate(self, m):
        return canonical_order(self.alphabet, m)


def _length_segment(alphabet, k):
    rank = {s: i for i, s in enumerate(alphabet.symbols)}

    def key(w):
        return [rank[s] for s in w]

    words = words_of_length(alphabet, k)
    palindromes = [w for w in words if is_palindrome(w)]
    pairs = sorted(
        {min(w, reverse(w), key=key) for w in words if not is_palindrome(w)}, key=key
    )
    segment = list(palindromes)
    for w in pairs:
        segment.extend((w, reverse(w)))
    return segment


@lru_cache(maxsize=64)
def _canonical_order(alphabet, n):
    entries = []
    for k in range(1, n + 1):
        entries.extend(_length_segment(alphabet, k))
    entries = tuple(entries)
    return WordOrder(alphabet, n, entries, {w: i for i, w in enumerate(entries)})


def canonical_order(alphabet=BINARY, n=1):
    """Return the :class:`WordOrder` of depth ``n`` over ``alphabet``.

    >>> canonical_order(BINARY, 2).entries
    ('0', '1', '00', '11', '01', '10')
    """
    n = check_depth(n)
    return _canonical_order(alphabet, n)

