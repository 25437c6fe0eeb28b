"""Hypothesis strategies and seeded samplers shared by the test modules."""

import math

import numpy as np
from hypothesis import strategies as st

from diophantine_so3.words import WordIndex

_INVERSE = (1, 0, 3, 2)


@st.composite
def letter_sequences(draw, min_size=0, max_size=8):
    n = draw(st.integers(min_size, max_size))
    seq = []
    for _ in range(n):
        options = [c for c in range(4) if not seq or c != _INVERSE[seq[-1]]]
        seq.append(draw(st.sampled_from(options)))
    return tuple(seq)


def words(min_size=0, max_size=8):
    return letter_sequences(min_size, max_size).map(WordIndex.from_letters)


# arbitrary (possibly unreduced) block lists, for reduce()
raw_blocks = st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), max_size=5)

angles = st.floats(0.0, 2 * math.pi, allow_nan=False, exclude_max=True)
points = st.tuples(angles, angles, angles)


def random_word(rng: np.random.Generator, n: int) -> WordIndex:
    seq = []
    for _ in range(n):
        options = [c for c in range(4) if not seq or c != _INVERSE[seq[-1]]]
        seq.append(int(options[rng.integers(len(options))]))
    return WordIndex.from_letters(seq)


def random_unit(rng: np.random.Generator):
    v = rng.normal(size=4)
    return v / np.linalg.norm(v)
