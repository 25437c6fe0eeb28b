import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diophantine_so3.measure import (
    BudgetError,
    DomainError,
    MeasureEstimate,
    PhiSpec,
    check_dm_lemma,
    dm_bound,
    phi_alpha_measure,
    phi_measure,
    phi_union_measure,
    sublevel_measure_1d,
    taylor_box_check,
    word_parameters,
)
from diophantine_so3.rotation import UnitQuaternion
from diophantine_so3.trigpoly import build_P
from diophantine_so3.words import WordIndex

GOLDEN = Path(__file__).parent / "golden"
ID = UnitQuaternion.identity()
A, AB, ABAB = (WordIndex.parse(t) for t in ("A", "AB", "ABAB"))


def test_dm_bound_examples():
    assert dm_bound(1, 0.1, 1.0, 2.0) == pytest.approx(0.8)
    assert dm_bound(2, 1e-4, 1.0, 2.0) == pytest.approx(8 * math.sqrt(3) * 1e-2)
    at_norm = dm_bound(3, 1.0, 1.0, 2.0)
    assert at_norm == pytest.approx(2 * 3 * 4 ** (1 / 3) * 2) and at_norm >= 2 and not at_norm.vacuous
    big = dm_bound(3, 5.0, 1.0, 2.0)
    assert big == 2.0 and big.vacuous
    with pytest.raises(DomainError):
        dm_bound(3, 5.0, 1.0, 2.0, strict=True)
    with pytest.raises(DomainError):
        dm_bound(0, 0.1, 1.0, 2.0)


def test_sublevel_examples():
    est = sublevel_measure_1d(lambda x: x, (-1, 1), 0.1)
    assert est.absolute == pytest.approx(0.2, abs=1e-4)
    assert sublevel_measure_1d(lambda x: x, (-1, 1), 5.0).absolute == pytest.approx(2.0)
    assert sublevel_measure_1d(lambda x: x * x - 0.5, (-1, 1), 0.0).absolute == 0.0
    with pytest.raises(ValueError):
        sublevel_measure_1d(lambda x: x, (-1, 1), 0.1, resolution=10)


@given(st.floats(0.05, 0.9), st.floats(1e-6, 0.2))
def test_sublevel_closed_form_quadratic(c, eps):
    # |x^2 - c| <= eps on [-1, 1]: two intervals around +-sqrt(c)
    lo = math.sqrt(max(c - eps, 0.0))
    hi = math.sqrt(min(c + eps, 1.0))
    est = sublevel_measure_1d(lambda x: x * x - c, (-1, 1), eps)
    assert est.absolute == pytest.approx(2 * (hi - lo), abs=1e-9)


def test_sublevel_finds_dip_between_grid_points():
    # the grid values near the dip stay above eps; the sublevel interval lies between them
    w, c = 7e-4, 0.0009
    f = lambda x: 1.0 - np.exp(-(((x - c) / w) ** 2))  # noqa: E731
    est = sublevel_measure_1d(f, (-1, 1), 0.5, resolution=1000)
    assert est.absolute == pytest.approx(2 * w * math.sqrt(math.log(2)), rel=1e-6)


def test_check_dm_examples():
    rep = check_dm_lemma([0, 1], (-1, 1), 0.1)
    assert rep["ok"] and rep["measured"] == pytest.approx(0.2, abs=1e-4) and rep["bound"] == pytest.approx(0.8)
    cheb = np.polynomial.chebyshev.cheb2poly([0, 0, 0, 0, 1])
    rep = check_dm_lemma(cheb, (-1, 1), 1.0)
    assert rep["ok"] and rep["measured"] == pytest.approx(2.0)


def test_check_dm_small_batch():
    rng = np.random.default_rng(8)
    for _ in range(40):
        deg = int(rng.integers(1, 11))
        coeffs = list(rng.integers(-5, 6, size=deg + 1))
        coeffs[-1] = coeffs[-1] or 1
        for eps in (1e-2, 1e-5, 1e-8):
            assert check_dm_lemma(coeffs, (-1, 1), eps)["ok"]


def test_measure_estimate_validation():
    with pytest.raises(ValueError):
        MeasureEstimate(value=1.5, method="grid", dimension=1)
    assert MeasureEstimate(value=0.25, method="grid", dimension=1, domain_volume=4).absolute == 1.0
    with pytest.raises(ValueError):
        PhiSpec(A, ID, 0.0)
    with pytest.raises(ValueError):
        PhiSpec(A, ID, 0.1, metric="taxicab")


def test_word_parameters():
    assert word_parameters(A) == (True, False, False)
    assert word_parameters(WordIndex.parse("BB")) == (False, True, True)
    assert word_parameters(AB) == (True, True, True)


def test_phi_examples():
    assert phi_measure(PhiSpec(AB, ID, 2.0), resolution=10**4).value == 1.0
    exact = 4 * math.asin(0.05) / (2 * math.pi)
    est = phi_measure(PhiSpec(A, ID, 0.1))
    assert est.value == pytest.approx(exact, abs=1e-5)
    # folding over +-Id doubles the set for word A
    est = phi_measure(PhiSpec(A, ID, 0.1, metric="so3"), resolution=10**5)
    assert est.value == pytest.approx(2 * exact, abs=1e-4)


def test_phi_shrinks_with_threshold():
    values = [phi_measure(PhiSpec(AB, ID, t), resolution=10**5).value for t in (0.5, 0.1, 0.01, 1e-4)]
    assert values == sorted(values, reverse=True)
    assert values[-1] <= 1e-4


@settings(max_examples=15)
@given(st.floats(0.05, 1.5), st.floats(0.05, 1.5))
def test_phi_monotone(t1, t2):
    lo, hi = sorted((t1, t2))
    m_lo = phi_measure(PhiSpec(AB, ID, lo), resolution=20**3).value
    m_hi = phi_measure(PhiSpec(AB, ID, hi), resolution=20**3).value
    assert m_lo <= m_hi


def test_grid_and_monte_carlo_agree():
    spec = PhiSpec(AB, ID, 0.5)
    grid = phi_measure(spec, resolution=10**6)
    mc = phi_measure(spec, method="monte-carlo", samples=4 * 10**5, seed=3)
    assert abs(grid.value - mc.value) <= 3 * mc.half_width
    again = phi_measure(spec, method="monte-carlo", samples=4 * 10**5, seed=3, workers=4)
    assert again == mc


def test_phi_alpha_examples():
    assert phi_alpha_measure(A, 0.5).value == 0.0
    assert phi_alpha_measure(A, 2.0).value == 1.0


def test_phi_alpha_abab_against_polynomial_oracle():
    # oracle: the integer polynomial of |dW/dalpha|^2 on a 200^3 midpoint lattice
    P = build_P(ABAB)
    axis = (np.arange(200) + 0.5) * (2 * math.pi / 200)
    a, b, g = np.meshgrid(axis, axis, axis, indexing="ij")
    vals = P.evaluate_float({"x_a": np.cos(a), "y_a": np.sin(a), "x_b": np.cos(b),
                             "y_b": np.sin(b), "x_g": np.cos(g), "y_g": np.sin(g)})
    oracle = float(np.mean(np.broadcast_to(vals, a.shape) <= 0.1))
    est = phi_alpha_measure(ABAB, 0.1)
    assert est.value == pytest.approx(oracle, abs=2e-3)


def test_union_examples():
    est = phi_union_measure(2, 1e6, ID, samples=10**5, seed=1)
    assert est.value == 0.0
    est = phi_union_measure(2, 1.2, ID, samples=10**5, seed=1)
    assert est.value <= est.extra["sum_individual"]
    assert est.extra["max_individual"] <= est.value
    with pytest.raises(BudgetError):
        phi_union_measure(3, 2.0, ID, budget=10)


def test_union_seed_42_golden():
    est = phi_union_measure(3, 2.0, ID, samples=10**6, seed=42)
    got = json.loads(json.dumps(est.to_dict()))
    path = GOLDEN / "union_n3_D2_seed42.json"
    if not path.exists():
        path.write_text(json.dumps(got, indent=2, sort_keys=True) + "\n")
    assert got == json.loads(path.read_text())
    assert est.value <= est.extra["sum_individual"]


@pytest.mark.parametrize("text", ["ABAB", "AAB", "ABaBB"])
def test_taylor_box_check(text):
    w = WordIndex.parse(text)
    n = len(w.letters())
    eta = 0.05
    rep = taylor_box_check(w, 0.01 * eta / n**2, eta, slices=6, seed=2)
    assert rep["ok"]
    assert rep["predicted"] < 1.0
