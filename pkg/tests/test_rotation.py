import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from diophantine_so3.rotation import (
    RotationTriple,
    UnitQuaternion,
    evaluate_components,
    evaluate_word,
    frobenius_distance,
    generator_A,
    generator_B,
    reduce_angle,
    rotation_angle,
    so3_distance,
    word_alpha_derivative,
    word_alpha_second_derivative,
)
from diophantine_so3.words import WordIndex, concat, invert, word_length

from strategies import points, random_unit, words

R2 = math.sqrt(2) / 2


def close(q, expected, tol=1e-12):
    return np.allclose(np.asarray(tuple(q)), np.asarray(expected), atol=tol, rtol=0)


def test_generator_A_values():
    assert close(generator_A(0.0), (1, 0, 0, 0))
    assert close(generator_A(math.pi / 2), (0, 1, 0, 0))
    assert close(generator_A(math.pi / 4), (R2, R2, 0, 0))


def test_generator_B_values():
    assert close(generator_B(0.0, 1.7), (1, 0, 0, 0))
    assert close(generator_B(math.pi / 2, math.pi / 2), (0, 0, 1, 0))
    assert close(generator_B(math.pi / 4, 0.0), (R2, R2, 0, 0))


def test_evaluate_word_values():
    ab = WordIndex(((1, 1),))
    assert close(evaluate_word(ab, RotationTriple(0, 0, 0.8)), (1, 0, 0, 0))
    assert close(evaluate_word(ab, RotationTriple(math.pi / 4, math.pi / 4, math.pi / 2)), (0.5, 0.5, 0.5, 0.5))
    assert close(evaluate_word(WordIndex(((2, 0),)), RotationTriple(math.pi / 2, 0, 0)), (-1, 0, 0, 0))


def test_so3_distance_values():
    c = UnitQuaternion(0.0, 0.6, 0.8, 0.0)
    assert so3_distance(c, c) == 0.0
    assert so3_distance(-c, c) == 0.0
    assert so3_distance(UnitQuaternion.identity(), UnitQuaternion(0, 1, 0, 0)) == pytest.approx(math.sqrt(2), abs=1e-15)


def test_rotation_angle_values():
    assert rotation_angle(UnitQuaternion.identity()) == 0.0
    assert rotation_angle(UnitQuaternion(0, 1, 0, 0)) == pytest.approx(math.pi)
    assert rotation_angle(UnitQuaternion(R2, R2, 0, 0)) == pytest.approx(math.pi / 2)


def test_rotation_triple_reduces_angles():
    t = RotationTriple(-0.5, 2 * math.pi, 7.0)
    assert t.alpha == pytest.approx(2 * math.pi - 0.5)
    assert t.beta == 0.0
    assert t.gamma == pytest.approx(7.0 - 2 * math.pi)
    assert all(0 <= v < 2 * math.pi for v in t.as_tuple())
    assert reduce_angle(-1e-300) < 2 * math.pi


def test_matrix_matches_vector_rotation():
    # q v q^-1 on pure quaternions agrees with the 3x3 matrix
    rng = np.random.default_rng(3)
    for _ in range(20):
        q = UnitQuaternion.from_components(random_unit(rng))
        v = rng.normal(size=3)
        p = UnitQuaternion(0.0, *v)
        rotated = q * p * q.conjugate()
        assert np.allclose(q.to_matrix() @ v, rotated.as_tuple()[1:], atol=1e-12)


def test_derivative_examples():
    a = WordIndex.parse("A")
    ab = WordIndex.parse("AB")
    for pt in (RotationTriple(0.3, 0.7, 1.1), RotationTriple(2.0, 5.0, 0.1)):
        assert np.sum(word_alpha_derivative(a, pt) ** 2) == pytest.approx(1.0, abs=1e-14)
        assert np.sum(word_alpha_derivative(ab, pt) ** 2) == pytest.approx(1.0, abs=1e-14)
        assert np.sum(word_alpha_second_derivative(a, pt) ** 2) == pytest.approx(1.0, abs=1e-14)


def _fd(word, pt, h):
    def f(a):
        return np.array(evaluate_components(word, a, pt.beta, pt.gamma), dtype=float)

    first = (f(pt.alpha + h) - f(pt.alpha - h)) / (2 * h)
    return f, first


def test_abab_derivatives_match_finite_differences():
    w = WordIndex.parse("ABAB")
    pt = RotationTriple(0.3, 0.7, 1.1)
    f, first = _fd(w, pt, 1e-6)
    d1 = word_alpha_derivative(w, pt)
    assert np.linalg.norm(d1 - first) <= 1e-7 * np.linalg.norm(d1)
    h = 1e-4
    second = (f(pt.alpha + h) - 2 * f(pt.alpha) + f(pt.alpha - h)) / h**2
    d2 = word_alpha_second_derivative(w, pt)
    assert np.linalg.norm(d2 - second) <= 1e-5 * np.linalg.norm(d2)
    assert np.sum(d2**2) <= 4**4


@given(st.tuples(*(st.floats(-1, 1) for _ in range(4))), st.tuples(*(st.floats(-1, 1) for _ in range(4))))
def test_norm_multiplicativity(a, b):
    if np.linalg.norm(a) < 1e-3 or np.linalg.norm(b) < 1e-3:
        return
    p, q = UnitQuaternion.from_components(a), UnitQuaternion.from_components(b)
    assert abs((p * q).norm_sq() - 1.0) < 1e-12
    assert close(p * p.inverse(), (1, 0, 0, 0))


@given(words(0, 8), words(0, 8), points)
def test_homomorphism(u, v, pt):
    t = RotationTriple(*pt)
    lhs = evaluate_word(concat(u, v), t)
    rhs = evaluate_word(u, t) * evaluate_word(v, t)
    assert np.linalg.norm(np.subtract(lhs.as_tuple(), rhs.as_tuple())) < 1e-10
    inv = evaluate_word(invert(u), t) * evaluate_word(u, t)
    assert close(inv, (1, 0, 0, 0), 1e-10)


@given(points, words(1, 6))
def test_distance_sign_invariance(pt, w):
    q = evaluate_word(w, RotationTriple(*pt))
    c = UnitQuaternion.from_components((0.3, -0.1, 0.9, 0.2))
    assert so3_distance(q, c) == so3_distance(-q, c)
    assert so3_distance(q, c) == so3_distance(q, -c)


def test_frobenius_equivalence():
    # |R(q) - R(c)|_F = 2 sqrt 2 sin(theta/2) and d = 2 sin(theta/4), so 2d <= F <= 2 sqrt 2 d
    rng = np.random.default_rng(11)
    for _ in range(500):
        q = UnitQuaternion.from_components(random_unit(rng))
        c = UnitQuaternion.from_components(random_unit(rng))
        d, F = so3_distance(q, c), frobenius_distance(q, c)
        assert 2 * d - 1e-12 <= F <= 2 * math.sqrt(2) * d + 1e-12


def test_unit_norm_after_long_product():
    w = WordIndex.from_letters([0, 2] * 5000)
    q = evaluate_word(w, RotationTriple(0.123, 1.234, 2.345))
    assert abs(q.norm_sq() - 1.0) < 1e-12


def test_lemma1_bound_sampled():
    rng = np.random.default_rng(5)
    from strategies import random_word

    for _ in range(500):
        w = random_word(rng, int(rng.integers(1, 13)))
        pt = RotationTriple(*(rng.random(3) * 2 * math.pi))
        d2 = word_alpha_second_derivative(w, pt)
        assert np.sum(d2**2) <= word_length(w) ** 4 * (1 + 1e-12)
