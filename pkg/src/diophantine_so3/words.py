"""Reduced words in A, B and their inverses, stored as exponent blocks.

A word ``A^{s1} B^{r1} ... A^{sm} B^{rm}`` is kept as the tuple of pairs
``((s1, r1), ..., (sm, rm))``. Interior exponents are nonzero; ``s1 == 0``
marks a word that starts with a B-syllable and ``rm == 0`` one that ends with
an A-syllable, so every reduced free-group word has exactly one canonical form.

Text form uses ``A a B b`` for A, A^-1, B, B^-1 (``ABab`` is the commutator).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

# Alphabet order used for enumeration: A, A^-1, B, B^-1.
LETTERS = "AaBb"
_LETTER_INFO = {"A": (0, 1), "a": (0, -1), "B": (1, 1), "b": (1, -1)}
_INVERSE = {0: 1, 1: 0, 2: 3, 3: 2}


class WordError(ValueError):
    pass


class TowerCollapseError(WordError):
    """The chosen commutator signs cancel to a word shorter than 4^k."""


@dataclass(frozen=True)
class WordIndex:
    blocks: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple((int(s), int(r)) for s, r in self.blocks))
        if not _is_canonical(self.blocks):
            raise WordError(f"non-canonical blocks {self.blocks!r}; use reduce()")

    @classmethod
    def empty(cls) -> WordIndex:
        return cls(())

    @classmethod
    def parse(cls, text: str) -> WordIndex:
        bad = set(text) - set(LETTERS)
        if bad:
            raise WordError(f"invalid letters {sorted(bad)!r} in word {text!r}")
        return from_syllables([_LETTER_INFO[ch] for ch in text])

    @classmethod
    def from_letters(cls, letters: Sequence[int]) -> WordIndex:
        """Build from letter codes 0..3 (A, a, B, b)."""
        return from_syllables([_LETTER_INFO[LETTERS[c]] for c in letters])

    @property
    def m(self) -> int:
        return len(self.blocks)

    def __len__(self) -> int:
        return word_length(self)

    def __str__(self) -> str:
        return self.to_text()

    def syllables(self) -> list[tuple[int, int]]:
        """(generator, exponent) pairs with generator 0 = A, 1 = B."""
        out = []
        for s, r in self.blocks:
            if s:
                out.append((0, s))
            if r:
                out.append((1, r))
        return out

    def letters(self) -> tuple[int, ...]:
        """Letter codes 0..3 (A, a, B, b), one per letter."""
        out = []
        for g, e in self.syllables():
            code = 2 * g + (0 if e > 0 else 1)
            out.extend([code] * abs(e))
        return tuple(out)

    def to_text(self) -> str:
        return "".join(LETTERS[c] for c in self.letters())

    def a_exponents(self) -> list[int]:
        return [s for s, _ in self.blocks]

    def has_a(self) -> bool:
        return any(s for s, _ in self.blocks)


def _is_canonical(blocks) -> bool:
    m = len(blocks)
    for p, (s, r) in enumerate(blocks):
        if s == 0 and p > 0:
            return False
        if r == 0 and p < m - 1:
            return False
        if s == 0 and r == 0:
            return False
    return True


def from_syllables(syllables) -> WordIndex:
    """Freely reduce a (generator, exponent) sequence and pack it into blocks."""
    stack: list[list[int]] = []
    for g, e in syllables:
        if e == 0:
            continue
        if stack and stack[-1][0] == g:
            stack[-1][1] += e
            if stack[-1][1] == 0:
                stack.pop()
        else:
            stack.append([g, e])
    blocks: list[tuple[int, int]] = []
    i = 0
    if stack and stack[0][0] == 1:
        blocks.append((0, stack[0][1]))
        i = 1
    while i < len(stack):
        s = stack[i][1]
        r = stack[i + 1][1] if i + 1 < len(stack) else 0
        blocks.append((s, r))
        i += 2
    return WordIndex(tuple(blocks))


def reduce(blocks) -> WordIndex:
    """Canonical form of an arbitrary block list (zeros and mergeable blocks allowed)."""
    if isinstance(blocks, WordIndex):
        blocks = blocks.blocks
    syl = []
    for s, r in blocks:
        syl.append((0, s))
        syl.append((1, r))
    return from_syllables(syl)


def word_length(word: WordIndex) -> int:
    return sum(abs(s) + abs(r) for s, r in word.blocks)


def invert(word: WordIndex) -> WordIndex:
    return from_syllables([(g, -e) for g, e in reversed(word.syllables())])


def concat(*words: WordIndex) -> WordIndex:
    syl = []
    for w in words:
        syl.extend(w.syllables())
    return from_syllables(syl)


def power(word: WordIndex, sign: int) -> WordIndex:
    return word if sign > 0 else invert(word)


def commutator(a: WordIndex, b: WordIndex) -> WordIndex:
    """reduce(a b a^-1 b^-1)."""
    return concat(a, b, invert(a), invert(b))


def enumerate_letter_sequences(n: int) -> Iterator[tuple[int, ...]]:
    """All reduced letter sequences of length n in lexicographic order."""
    if n < 1:
        raise WordError("word length must be positive")
    seq = [0] * n

    def rec(depth: int):
        if depth == n:
            yield tuple(seq)
            return
        forbidden = _INVERSE[seq[depth - 1]] if depth else -1
        for c in range(4):
            if c != forbidden:
                seq[depth] = c
                yield from rec(depth + 1)

    yield from rec(0)


def enumerate_words(n: int) -> Iterator[WordIndex]:
    """Every reduced word of length exactly n, each once, in lexicographic order."""
    for letters in enumerate_letter_sequences(n):
        yield WordIndex.from_letters(letters)


def count_reduced_words(n: int) -> int:
    return 4 * 3 ** (n - 1) if n >= 1 else 1


def default_tower_signs(k: int) -> tuple[int, ...]:
    """Base signs (+, +) then, per level, (+, -) for the (A-track, B-track) orders."""
    return (1, 1) + (1, -1) * k


def _tower_level(a: WordIndex, b: WordIndex, order_a: int, order_b: int):
    # order +1: x y x^-1 y^-1; order -1: x^-1 y^-1 x y.
    new_a = commutator(a, b) if order_a > 0 else commutator(invert(a), invert(b))
    new_b = commutator(b, a) if order_b > 0 else commutator(invert(b), invert(a))
    return new_a, new_b


def commutator_tower_pair(k: int, signs: Sequence[int] | None = None) -> tuple[WordIndex, WordIndex]:
    """The pair (A_k, B_k) of the commutator iteration.

    ``signs = (eA, eB, oA1, oB1, ..., oAk, oBk)``: ``A_0 = A^eA``, ``B_0 = B^eB``
    and at level j the A-track uses commutator order ``oAj`` and the B-track
    ``oBj`` (+1 for ``x y x^-1 y^-1``, -1 for ``x^-1 y^-1 x y`` with
    ``(x, y) = (A_{j-1}, B_{j-1})`` resp. ``(B_{j-1}, A_{j-1})``).
    Missing trailing entries are taken from :func:`default_tower_signs`.
    Raises :class:`TowerCollapseError` if a word needed for ``A_k`` is shorter
    than 4^level.
    """
    if k < 0:
        raise WordError("tower level must be nonnegative")
    full = list(default_tower_signs(k))
    if signs is not None:
        if len(signs) > len(full):
            raise WordError(f"too many signs for k={k}: {len(signs)} > {len(full)}")
        for i, s in enumerate(signs):
            if s not in (1, -1):
                raise WordError(f"sign entries must be +1 or -1, got {s!r}")
            full[i] = s
    a = WordIndex(((full[0], 0),))
    b = WordIndex(((0, full[1]),))
    for level in range(1, k + 1):
        a, b = _tower_level(a, b, full[2 * level], full[2 * level + 1])
        need = [a] if level == k else [a, b]
        for w in need:
            if word_length(w) != 4**level:
                raise TowerCollapseError(
                    f"signs {tuple(full)} collapse at level {level}: length {word_length(w)} != {4 ** level}"
                )
    return a, b


def commutator_tower(k: int, signs: Sequence[int] | None = None) -> WordIndex:
    return commutator_tower_pair(k, signs)[0]
