"""Exact word arithmetic in free groups.

Letters are nonzero integers: ``+i`` is the i-th generator, ``-i`` its
inverse.  Generator indices are unbounded, so measures supported on
arbitrarily many generators are representable; the rank only enters where
ball counting needs it.  A :class:`Word` is always freely reduced, and the
Cayley graph of the free group on these generators is a tree, so geodesics
and Gromov products are exact integers.
"""

from __future__ import annotations

from typing import Iterable, Iterator, NamedTuple

__all__ = [
    "Letter",
    "Word",
    "IDENTITY",
    "reduce_letters",
    "multiply",
    "inverse",
    "dist",
    "common_prefix_len",
    "gromov_product",
    "geodesic",
    "ball_size",
    "enumerate_ball",
    "word_from_str",
    "word_to_str",
]


class Letter(NamedTuple):
    """A single generator or inverse generator."""

    generator_index: int
    sign: int

    def as_int(self) -> int:
        return self.generator_index * self.sign

    @classmethod
    def from_int(cls, x: int) -> "Letter":
        if x == 0:
            raise ValueError("letter 0 is not a generator")
        return cls(abs(x), 1 if x > 0 else -1)


def reduce_letters(letters: Iterable[int]) -> tuple[int, ...]:
    """Freely reduce a letter sequence (stack cancellation)."""
    out: list[int] = []
    for x in letters:
        if x == 0:
            raise ValueError("letter 0 is not a generator")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


class Word:
    """A freely reduced word; immutable, hashable, usable as a group element.

    The constructor reduces its input.  ``Word()`` is the identity.
    """

    __slots__ = ("letters", "_hash")

    def __init__(self, letters: Iterable[int] = (), _reduced: bool = False):
        if _reduced:
            self.letters = tuple(letters)
        else:
            self.letters = reduce_letters(letters)
        self._hash = hash(self.letters)

    # -- algebra ---------------------------------------------------------

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def inverse(self) -> "Word":
        return Word(tuple(-x for x in reversed(self.letters)), _reduced=True)

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        result = IDENTITY
        for _ in range(n):
            result = result * self
        return result

    # -- container / comparison ------------------------------------------

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self) -> int:
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __repr__(self) -> str:
        return f"Word({word_to_str(self)!r})"

    def is_identity(self) -> bool:
        return not self.letters


IDENTITY = Word()


def multiply(x: Word, y: Word) -> Word:
    """Reduced product x*y.  Cancellation only happens at the junction."""
    a, b = x.letters, y.letters
    i = len(a)
    j = 0
    nb = len(b)
    while i > 0 and j < nb and a[i - 1] == -b[j]:
        i -= 1
        j += 1
    return Word(a[:i] + b[j:], _reduced=True)


def inverse(x: Word) -> Word:
    return x.inverse()


def dist(x: Word, y: Word) -> int:
    """Word metric: d(x, y) = |x^-1 y|.  Left-invariant."""
    c = common_prefix_len(x, y)
    return (len(x) - c) + (len(y) - c)


def common_prefix_len(x: Word, y: Word) -> int:
    a, b = x.letters, y.letters
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return i


def gromov_product(x: Word, y: Word, z: Word) -> int:
    """(x, y)_z = (d(x,z) + d(y,z) - d(x,y)) / 2.

    In the tree this equals the distance from z to the geodesic [x, y];
    word lengths make the numerator even, so the value is an exact int.
    """
    num = dist(x, z) + dist(y, z) - dist(x, y)
    assert num % 2 == 0 and num >= 0
    return num // 2


def geodesic(x: Word, y: Word) -> list[Word]:
    """The unique tree geodesic from x to y, as d(x,y)+1 vertices.

    Materializes every vertex; quadratic in d(x,y), meant for moderate
    distances.  For long geodesics from the origin, use word prefixes.
    """
    c = common_prefix_len(x, y)
    path = []
    # descend from x to the common prefix, then climb to y
    for i in range(len(x), c - 1, -1):
        path.append(Word(x.letters[:i], _reduced=True))
    for i in range(c + 1, len(y) + 1):
        path.append(Word(y.letters[:i], _reduced=True))
    return path


def ball_size(r: int, k: int) -> int:
    """Number of elements of F_k at distance <= r from the identity.

    1 + 2k((2k-1)^r - 1)/(2k-2) for k >= 2, and 2r+1 for k = 1.
    Python ints do not overflow; values are exact.
    """
    if k < 1:
        raise ValueError("rank must be >= 1")
    if r < 0:
        raise ValueError("radius must be >= 0")
    if k == 1:
        return 2 * r + 1
    return 1 + 2 * k * ((2 * k - 1) ** r - 1) // (2 * k - 2)


def enumerate_ball(r: int, k: int) -> list[Word]:
    """All reduced words of length <= r over generators 1..k (BFS order)."""
    if k < 1 or r < 0:
        raise ValueError("need k >= 1 and r >= 0")
    alphabet = [i for i in range(1, k + 1)] + [-i for i in range(1, k + 1)]
    frontier = [()]
    out = [IDENTITY]
    for _ in range(r):
        nxt = []
        for w in frontier:
            last = w[-1] if w else 0
            for x in alphabet:
                if x != -last:
                    nxt.append(w + (x,))
        out.extend(Word(w, _reduced=True) for w in nxt)
        frontier = nxt
    return out


# -- serialization ---------------------------------------------------------
#
# Generators 1..26 print as a..z, inverses as A..Z; higher indices print as
# "x7^-1"-style tokens.  The empty word prints as "e"; the one word whose
# letter form would also read "e" (the single generator 5) is emitted in
# token form "x5" so that parsing is bit-exact.


def _letter_to_str(x: int) -> str:
    i = abs(x)
    if i <= 26:
        c = chr(ord("a") + i - 1)
        return c if x > 0 else c.upper()
    return f"x{i}" if x > 0 else f"x{i}^-1"


def word_to_str(w: Word) -> str:
    if not w.letters:
        return "e"
    s = "".join(_letter_to_str(x) for x in w.letters)
    if s == "e":
        return "x5"
    return s


def word_from_str(s: str) -> Word:
    if s == "e":
        return IDENTITY
    letters: list[int] = []
    i = 0
    n = len(s)
    while i < n:
        c = s[i]
        if c == "x" and i + 1 < n and s[i + 1].isdigit():
            j = i + 1
            while j < n and s[j].isdigit():
                j += 1
            idx = int(s[i + 1 : j])
            if idx == 0:
                raise ValueError(f"invalid generator index in {s!r}")
            if s[j : j + 3] == "^-1":
                letters.append(-idx)
                i = j + 3
            else:
                letters.append(idx)
                i = j
        elif "a" <= c <= "z":
            letters.append(ord(c) - ord("a") + 1)
            i += 1
        elif "A" <= c <= "Z":
            letters.append(-(ord(c) - ord("A") + 1))
            i += 1
        else:
            raise ValueError(f"cannot parse letter at position {i} in {s!r}")
    word = Word(letters)
    if len(word) != len(letters):
        raise ValueError(f"{s!r} is not freely reduced")
    return word
