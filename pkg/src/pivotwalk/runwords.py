"""Run-length-compressed reduced words.

A run word is a tuple of (letter, count) pairs with count >= 1, adjacent
runs carrying neither the same nor inverse letters.  It represents the
same reduced word as ``words.Word`` but arithmetic costs O(runs touched)
instead of O(letters), which is what makes desk-scale experiments with
Schottky elements like x_j^102 affordable: such elements are single runs.

All operations are exact; this module is an internal representation, the
public word type stays ``words.Word``.
"""

from __future__ import annotations

from .words import Word

__all__ = [
    "from_word",
    "to_word",
    "from_letters",
    "runs_length",
    "runs_inverse",
    "runs_concat",
    "runs_power",
    "cancel_length",
    "runs_lcp",
    "RunStack",
]

Runs = tuple  # tuple[tuple[int, int], ...]

EMPTY: Runs = ()


def from_word(w: Word) -> Runs:
    return from_letters(w.letters)


def from_letters(letters) -> Runs:
    out = []
    for x in letters:
        if out and out[-1][0] == x:
            out[-1][1] += 1
        else:
            out.append([x, 1])
    return tuple((l, c) for l, c in out)


def to_word(runs: Runs) -> Word:
    letters = []
    for l, c in runs:
        letters.extend([l] * c)
    return Word(letters, _reduced=True)


def runs_length(runs: Runs) -> int:
    return sum(c for _, c in runs)


def runs_inverse(runs: Runs) -> Runs:
    return tuple((-l, c) for l, c in reversed(runs))


def runs_power(letter: int, count: int) -> Runs:
    return ((letter, count),) if count else EMPTY


def _junction(a: list, b: list) -> int:
    """Cancel/merge b across the junction into a, in place; a gains all of
    b's surviving runs.  Returns the number of letters cancelled.

    a holds mutable [letter, count] pairs; b is consumed logically via an
    index, never popped from the front.
    """
    cancelled = 0
    j = 0
    nb = len(b)
    while a and j < nb:
        la, ca = a[-1]
        lb, cb = b[j]
        if la == -lb:
            m = ca if ca < cb else cb
            cancelled += m
            if ca == m:
                a.pop()
            else:
                a[-1][1] = ca - m
            if cb == m:
                j += 1
            else:
                b[j] = [lb, cb - m]
        elif la == lb:
            a[-1][1] = ca + cb
            j += 1
            break
        else:
            break
    for idx in range(j, nb):
        l, c = b[idx]
        a.append([l, c])
    return cancelled


def runs_concat(x: Runs, y: Runs) -> Runs:
    a = [[l, c] for l, c in x]
    _junction(a, [[l, c] for l, c in y])
    return tuple((l, c) for l, c in a)


def _cancel_at_junction(a, na: int, b) -> int:
    """Letters cancelled when the word a[:na] is multiplied by b.

    a and b are any indexable sequences of (letter, count) pairs; nothing
    is copied or mutated, so this is safe to call against a live stack.
    """
    i = na
    j = 0
    nb = len(b)
    cancelled = 0
    ca = a[i - 1][1] if i else 0
    cb = b[0][1] if nb else 0
    while i and j < nb:
        if a[i - 1][0] != -b[j][0]:
            break
        m = ca if ca < cb else cb
        cancelled += m
        ca -= m
        cb -= m
        if ca == 0:
            i -= 1
            ca = a[i - 1][1] if i else 0
        if cb == 0:
            j += 1
            cb = b[j][1] if j < nb else 0
    return cancelled


def cancel_length(x: Runs, y: Runs) -> int:
    """Letters cancelled forming x*y, i.e. (|x| + |y| - |x y|) / 2."""
    return _cancel_at_junction(x, len(x), y)


def runs_lcp(x: Runs, y: Runs) -> int:
    """Common prefix length, in letters."""
    common = 0
    for (lx, cx), (ly, cy) in zip(x, y):
        if lx != ly:
            break
        if cx == cy:
            common += cx
        else:
            common += cx if cx < cy else cy
            break
    return common


class RunStack:
    """Mutable reduced word supporting amortized O(1) run pushes.

    Used as the walk's running position; ``push`` multiplies on the right
    and returns the number of letters cancelled at the junction (which is
    exactly the Gromov product needed by the local geodesic conditions).
    """

    __slots__ = ("runs", "_length")

    def __init__(self, runs: Runs = EMPTY):
        self.runs = [[l, c] for l, c in runs]
        self._length = runs_length(runs)

    def __len__(self) -> int:
        return self._length

    def push(self, word: Runs) -> int:
        pushed = runs_length(word)
        cancelled = _junction(self.runs, [[l, c] for l, c in word])
        self._length += pushed - 2 * cancelled
        return cancelled

    def peek_cancel(self, word: Runs) -> int:
        """Cancellation that push(word) would produce, without mutating."""
        return _cancel_at_junction(self.runs, len(self.runs), word)

    def snapshot(self) -> Runs:
        return tuple((l, c) for l, c in self.runs)

    def reset(self, runs: Runs = EMPTY) -> None:
        self.runs = [[l, c] for l, c in runs]
        self._length = runs_length(runs)
