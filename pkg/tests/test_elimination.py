import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from sympy.polys.subresultants_qq_zz import sylvester as sympy_sylvester

from diophantine_so3.elimination import (
    ChainSizeError,
    DegreeError,
    DegeneracyError,
    bareiss_determinant,
    circle_resultant,
    coefficient_sup_bound,
    elimination_chain,
    integrate_square,
    lemma_a_decompose,
    markov_check,
    markov_coefficient_bounds,
    resultant,
    sylvester_matrix,
    verify_height_bounds,
)
from diophantine_so3.poly import VARIABLES, IntPoly, circle, pack
from diophantine_so3.trigpoly import build_P
from diophantine_so3.words import WordIndex, enumerate_words

from test_poly import SYMS, from_sympy, to_sympy


def sym_res(f, g, var):
    # sympy.resultant flips the sign in some degree patterns; its Sylvester matrix does not
    return sympy.expand(sympy_sylvester(f, g, var).det())


GOLDEN = Path(__file__).parent / "golden"
x, y = IntPoly.var("x_a"), IntPoly.var("y_a")
CIRC = circle("x_a", "y_a")
ABAB = WordIndex.parse("ABAB")

# polynomials in (x_a, y_a, x_b) with positive y-degree
bivariate = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 1)),
                            st.integers(-9, 9), min_size=1, max_size=5).map(
    lambda d: IntPoly({pack((e[0], e[1], e[2], 0, 0, 0)): c for e, c in d.items()})).filter(
    lambda p: p.degree("y_a") > 0)


def test_resultant_examples():
    assert resultant(y, CIRC, "y_a") == x * x - 1
    assert resultant(y - 1, y + 1, "y_a") == IntPoly.constant(2)
    p = y * y * x + 3 * y - x
    assert resultant(p, p, "y_a").is_zero()
    with pytest.raises(DegreeError):
        resultant(x + 1, CIRC, "y_a")


def test_sylvester_shape():
    M = sylvester_matrix(y * y + 1, y * y * y, "y_a")
    assert len(M) == 5 and all(len(row) == 5 for row in M)


def test_bareiss_against_sympy():
    rng = np.random.default_rng(4)
    for _ in range(10):
        A = rng.integers(-5, 6, size=(5, 5))
        M = [[IntPoly.constant(int(v)) for v in row] for row in A]
        assert bareiss_determinant(M).constant_term() == int(sympy.Matrix(A.tolist()).det())


@given(bivariate, bivariate)
def test_resultant_matches_sympy(p, q):
    expected = sym_res(to_sympy(p), to_sympy(q), SYMS[1])
    assert resultant(p, q, "y_a") == from_sympy(expected)


@given(bivariate)
def test_circle_kernel_matches_sylvester(p):
    assert circle_resultant(p, "x_a", "y_a") == resultant(p, CIRC, "y_a")
    assert circle_resultant(x + 2, "x_a", "y_a") == (x + 2) * (x + 2)


@given(bivariate, bivariate)
def test_resultant_multiplicative(p, q):
    lhs = circle_resultant(p * q, "x_a", "y_a")
    assert lhs == circle_resultant(p, "x_a", "y_a") * circle_resultant(q, "x_a", "y_a")


def _shared_root(p, q, x0):
    def roots(poly):
        coeffs = [float(c.evaluate({"x_a": x0})) for c in poly.coeffs_in("y_a")]
        return np.roots(coeffs[::-1])

    rp, rq = roots(p), roots(q)
    return bool(np.min(np.abs(rp[:, None] - rq[None, :])) < 1e-6)


def test_common_root_equivalence():
    rng = np.random.default_rng(17)

    def rand_poly(dy):
        # monic in y so specialization keeps the degree
        p = y**dy
        for j in range(dy):
            for i in range(3):
                p = p + int(rng.integers(-4, 5)) * x**i * y**j
        return p

    planted = 0
    for trial in range(100):
        x0 = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))
        p, q = rand_poly(int(rng.integers(1, 4))), rand_poly(int(rng.integers(1, 4)))
        if trial % 2 == 0:
            a = int(rng.integers(-3, 4))
            # force the common root y = a above x = x0
            den = x0.denominator
            shift = (den * x - x0.numerator)
            p = p * (y - a)
            q = (y - a) * q + shift * rand_poly(1)
            planted += 1
        r0 = resultant(p, q, "y_a").evaluate({"x_a": x0})
        assert (r0 == 0) == _shared_root(p, q, float(x0))
    assert planted == 50


def test_lemma_a_examples():
    d = lemma_a_decompose(y, "x_a", "y_a")
    assert d.R == x * x - 1 and d.R1.is_zero() and d.R2 == IntPoly.constant(1)
    with pytest.raises(DegreeError):
        lemma_a_decompose(IntPoly.constant(1))
    rep = verify_height_bounds(d, r=1, H=1)
    assert rep["holds"]
    assert rep["rows"][0]["observed_max"] == pytest.approx(1.0)
    assert rep["rows"][2]["observed_max"] == 1.0 and rep["rows"][2]["bound"] == 2.0
    assert verify_height_bounds(d, 1, 1) == rep


def test_lemma_a_reconstruction_abab():
    # the reduced P of ABAB is alpha-free; the unreduced sum of squares carries the y_a dependence
    P = build_P(ABAB, reduce=False)
    d = lemma_a_decompose(P, "x_a", "y_a")
    assert d.reconstruct(7) == resultant(P - 7, CIRC, "y_a")
    for kernel in ("circle", "sylvester"):
        assert lemma_a_decompose(P, kernel=kernel) == d


@given(bivariate)
def test_eps_quadraticity(p):
    d = lemma_a_decompose(p)
    for eps in (-2, -1, 0, 3, 5):
        assert d.reconstruct(eps) == resultant(p - eps, CIRC, "y_a")


@pytest.mark.parametrize("text", ["ABAB", "ABABA", "AABAb"])
def test_height_bounds_on_words(text):
    P = build_P(WordIndex.parse(text), reduce=False)
    d = lemma_a_decompose(P)
    rep = verify_height_bounds(d, P.degree("y_a"), coefficient_sup_bound(P, "y_a"), grid=9)
    assert rep["holds"]


def test_integrate_square_examples():
    assert integrate_square(IntPoly.constant(1), "x_a").value() == 2
    I = integrate_square(x, "x_a")
    assert I.value() == Fraction(2, 3)
    assert I.scaled == IntPoly.constant(2) and I.denominator == 3
    assert integrate_square(x * x - 1, "x_a").value() == Fraction(16, 15)
    assert integrate_square(IntPoly(), "x_a").is_zero()
    with pytest.raises(AssertionError):
        integrate_square(x**5, "x_a", factorial_arg=3)


@given(bivariate)
def test_integrate_square_matches_sympy(p):
    I = integrate_square(p, "x_a")
    expected = sympy.integrate(sympy.expand(to_sympy(p) ** 2), (SYMS[0], -1, 1))
    assert sympy.expand(to_sympy(I.scaled) / I.denominator - expected) == 0
    assert not I.is_zero()


def test_markov_examples():
    for n in range(1, 8):
        rep = markov_check([0] * n + [1])
        assert rep["max_df"] == pytest.approx(n) and rep["holds"]
    rep = markov_check([3.0])
    assert rep["max_df"] == 0 and rep["holds"]
    # Chebyshev polynomials attain the bound
    T = np.polynomial.chebyshev.cheb2poly([0] * 5 + [1])
    assert markov_check(T)["max_df"] == pytest.approx(25, rel=1e-9)


def _stage_one_bounds(reduce_P):
    rec = elimination_chain(ABAB, reduce_P=reduce_P)
    raw = build_P(ABAB, reduce=False)
    s, r, H = raw.degree("x_a"), raw.degree("y_a"), coefficient_sup_bound(raw, "y_a")
    lcm = integrate_square(rec.polys["R"], "x_a").denominator
    return [markov_coefficient_bounds(rec.polys["P1"], s, r, H, v, denominator=lcm)
            for v in ("x_b", "y_b", "x_g", "y_g")]


def test_markov_coefficient_bounds_abab():
    for rep in _stage_one_bounds(reduce_P=True):
        assert rep["holds"] and rep["markov_bound_holds"] and rep["markov_holds"]
    with pytest.raises(ValueError):
        markov_coefficient_bounds(IntPoly.var("x_b"), 1, 0, 1, "x_b")


def test_markov_derived_bound_on_unreduced_route():
    reports = _stage_one_bounds(reduce_P=False)
    assert all(rep["markov_bound_holds"] and rep["markov_holds"] for rep in reports)
    # the stated l-dependence is tighter than l-fold Markov and fails at the top power of y_b
    y_b = reports[1]
    assert not y_b["holds"]
    assert [row["l"] for row in y_b["rows"] if not row["holds"]] == [16]


def test_chain_abab():
    rec = elimination_chain(ABAB)
    R2 = rec.final()
    assert R2.variables() == ("x_g",)
    assert R2.degree("x_g") <= 512
    assert rec.certificate["positive"]
    assert rec.bounds["P1_ok"] and rec.bounds["R2_ok"] and rec.bounds["P1_total_degree"] <= 16 * 4
    names = [s["name"] for s in rec.stages if "total_degree" in s]
    assert names == ["P", "R", "P1", "R1", "P2", "R2"]


def test_chain_stagewise_against_sympy():
    rec = elimination_chain(ABAB)
    polys = rec.polys
    pairs = (("P", "R", "x_a", "y_a"), ("P1", "R1", "x_b", "y_b"), ("P2", "R2", "x_g", "y_g"))
    for src, dst, xv, yv in pairs:
        xs, ys = SYMS[VARIABLES.index(xv)], SYMS[VARIABLES.index(yv)]
        p = to_sympy(polys[src])
        if polys[src].degree(yv) == 0:
            expected = sympy.expand(p**2)
        else:
            expected = sym_res(p, ys**2 + xs**2 - 1, ys)
        assert to_sympy(polys[dst]) == sympy.expand(expected)
    for src, dst, var in (("R", "P1", 0), ("R1", "P2", 2)):
        integral = sympy.integrate(sympy.expand(to_sympy(polys[src]) ** 2), (SYMS[var], -1, 1))
        ratio = sympy.simplify(to_sympy(polys[dst]) / integral)
        assert ratio.is_Rational and ratio > 0


def test_chain_sampled_at_rational_points():
    # R2 at rational x_g equals the resultant of P2 specialized there
    rec = elimination_chain(ABAB)
    P2, R2 = rec.polys["P2"], rec.polys["R2"]
    yg = sympy.Symbol("t")
    for xg in (Fraction(1, 3), Fraction(-2, 7), Fraction(5, 4), Fraction(0)):
        spec = sum(c.evaluate({"x_g": xg}) * yg**l for l, c in enumerate(P2.coeffs_in("y_g")))
        spec = sympy.nsimplify(spec)
        if sympy.Poly(spec, yg).degree() == 0:
            expected = spec**2
        else:
            expected = sym_res(spec, yg**2 + sympy.Rational(xg.numerator, xg.denominator) ** 2 - 1, yg)
        assert R2.evaluate({"x_g": xg}) == expected


def test_chain_routes_agree_up_to_positive_factor():
    finals = [elimination_chain(ABAB, reduce_circles=rc, reduce_P=rp).final()
              for rc in (False, True) for rp in (True, False)]
    for xg in (Fraction(1, 2), Fraction(3, 5), Fraction(-1, 7)):
        vals = [f.evaluate({"x_g": xg}) for f in finals]
        assert all(v > 0 for v in vals)


def test_chain_golden():
    rec = elimination_chain(ABAB)
    got = json.loads(rec.to_json())
    path = GOLDEN / "chain_ABAB.json"
    if not path.exists():
        path.write_text(rec.to_json() + "\n")
    assert got == json.loads(path.read_text())


def test_chain_trivial_and_errors():
    rec = elimination_chain(WordIndex.parse("A"))
    assert rec.trivial and rec.certificate["positive"] and rec.certificate["constant_P"] == 1
    rec = elimination_chain(WordIndex.parse("BB"))
    assert rec.trivial and rec.certificate["alpha_free"] and not rec.certificate["positive"]
    with pytest.raises(ChainSizeError):
        elimination_chain(WordIndex.parse("ABABA"))
    assert issubclass(DegeneracyError, ValueError)


@pytest.mark.parametrize("n", range(2, 5))
def test_chain_positive_for_all_short_words(n):
    for w in enumerate_words(n):
        rec = elimination_chain(w)
        if rec.trivial:
            assert rec.certificate["positive"] or rec.certificate["alpha_free"]
            assert rec.certificate["alpha_free"] == (not w.has_a())
            continue
        assert rec.certificate["positive"]
        assert rec.bounds["P1_ok"] and rec.bounds["R2_ok"] and rec.bounds["R2_univariate"]
