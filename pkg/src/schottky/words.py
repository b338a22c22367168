"""Reduced words in the free group on ``g`` generators.

A word is a tuple of letters ``(i, e)`` with generator index ``i`` in
``1..g`` and exponent ``e = +1/-1``.  Words are written left to right as
products, so the leftmost letter is applied last; it is the *leading*
letter that decides where the word sends the fundamental domain.
"""

from __future__ import annotations

from typing import Iterator, Sequence, Tuple

import numpy as np

from .errors import NotReduced, ParseError
from .psl import ProjMap

Letter = Tuple[int, int]


def _letters(g: int) -> list[Letter]:
    return [(i, e) for i in range(1, g + 1) for e in (1, -1)]


class ReducedWord:
    """An immutable reduced word; the empty word is the identity."""

    __slots__ = ("letters",)

    def __init__(self, letters: Sequence[Sequence[int]] = ()):
        out = []
        for item in letters:
            if len(item) != 2:
                raise ParseError(f"letter {item!r} is not an (index, sign) pair")
            i, e = int(item[0]), int(item[1])
            if i < 1 or e not in (1, -1):
                raise ParseError(f"bad letter {(i, e)}")
            if out and out[-1] == (i, -e):
                raise NotReduced(f"adjacent letters {out[-1]} and {(i, e)} cancel")
            out.append((i, e))
        self.letters: tuple = tuple(out)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __eq__(self, other):
        return isinstance(other, ReducedWord) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __repr__(self):
        if not self.letters:
            return "ReducedWord(id)"
        body = " ".join(f"g{i}" + ("" if e == 1 else "^-1") for i, e in self.letters)
        return f"ReducedWord({body})"

    @property
    def leading(self) -> Letter:
        if not self.letters:
            raise ValueError("the identity word has no leading letter")
        return self.letters[0]

    def inverse(self) -> "ReducedWord":
        return ReducedWord([(i, -e) for i, e in reversed(self.letters)])

    def lift(self, generators: Sequence[ProjMap]) -> np.ndarray:
        """Matrix of the word, multiplying lifts left to right."""
        n1 = generators[0].lift.shape[0]
        out = np.eye(n1, dtype=complex)
        for i, e in self.letters:
            if i > len(generators):
                raise ValueError(f"word uses generator {i} but only {len(generators)} are given")
            g = generators[i - 1]
            out = out @ (g.lift if e == 1 else g.inverse().lift)
        return out

    def evaluate(self, generators: Sequence[ProjMap]) -> ProjMap:
        return ProjMap(self.lift(generators))

    def to_json(self):
        return [list(l) for l in self.letters]

    @classmethod
    def from_json(cls, data) -> "ReducedWord":
        if not isinstance(data, list):
            raise ParseError("a word is a list of [index, sign] pairs")
        return cls(data)


def word_count(g: int, max_len: int) -> int:
    """Number of reduced words of length at most ``max_len``, identity included."""
    return 1 + sum(2 * g * (2 * g - 1) ** (l - 1) for l in range(1, max_len + 1))


def enumerate_reduced_words(g: int, max_len: int) -> Iterator[ReducedWord]:
    """All reduced words of length ``<= max_len`` in shortlex order.

    Letters are ordered ``(1,+1) < (1,-1) < (2,+1) < ...``; shorter words
    come first and words of equal length are lexicographic.
    """
    if g < 1 or max_len < 0:
        raise ValueError("need g >= 1 and max_len >= 0")
    alphabet = _letters(g)
    yield ReducedWord()
    layer = [()]
    for _ in range(max_len):
        nxt = []
        for w in layer:
            for a in alphabet:
                if w and w[-1] == (a[0], -a[1]):
                    continue
                nxt.append(w + (a,))
        for w in nxt:
            yield ReducedWord(w)
        layer = nxt
