"""Sylvester resultants and the three-stage elimination of the circle relations.

The chain eliminates ``(x_a, y_a)``, then ``(x_b, y_b)``, then ``(x_g, y_g)``
from ``build_P(word)``. Each stage takes the resultant with ``y^2 + x^2 - 1``
and then integrates the square over ``x``. The result is a univariate integer
polynomial ``R2(x_g)`` whose squared integral is a positive rational exactly
when no stage degenerated.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .poly import IntPoly, circle, var_index, VARIABLES
from .trigpoly import build_P, height_bound
from .words import WordIndex, word_length

MAX_CHAIN_LENGTH = 4


class EliminationError(ValueError):
    pass


class DegreeError(EliminationError):
    """An input is constant in the variable to be eliminated."""


class DegeneracyError(EliminationError):
    """A stage of the elimination chain produced the zero polynomial."""


class ChainSizeError(EliminationError):
    pass


# ----- Sylvester resultant ------------------------------------------------

def sylvester_matrix(p1: IntPoly, p2: IntPoly, var) -> list[list[IntPoly]]:
    """(r+s) x (r+s) Sylvester matrix: s shifted rows of p1, then r rows of p2.

    r and s are the true degrees of p1 and p2 in ``var``.
    """
    c1 = p1.coeffs_in(var)
    c2 = p2.coeffs_in(var)
    r, s = len(c1) - 1, len(c2) - 1
    size = r + s
    zero = IntPoly()
    rows = []
    for i in range(s):
        row = [zero] * size
        for j, c in enumerate(reversed(c1)):
            row[i + j] = c
        rows.append(row)
    for i in range(r):
        row = [zero] * size
        for j, c in enumerate(reversed(c2)):
            row[i + j] = c
        rows.append(row)
    return rows


def bareiss_determinant(matrix: list[list[IntPoly]]) -> IntPoly:
    """Fraction-free Gaussian elimination; every division is exact."""
    M = [list(row) for row in matrix]
    n = len(M)
    if n == 0:
        return IntPoly.constant(1)
    sign = 1
    prev = IntPoly.constant(1)
    for k in range(n - 1):
        if M[k][k].is_zero():
            for i in range(k + 1, n):
                if not M[i][k].is_zero():
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return IntPoly()
        pivot = M[k][k]
        for i in range(k + 1, n):
            mik = M[i][k]
            for j in range(k + 1, n):
                num = M[i][j] * pivot
                if not mik.is_zero() and not M[k][j].is_zero():
                    num = num - mik * M[k][j]
                M[i][j] = num.exact_div(prev) if not prev.is_constant() or prev.constant_term() != 1 else num
            M[i][k] = IntPoly()
        prev = pivot
    det = M[n - 1][n - 1]
    return -det if sign < 0 else det


def resultant(p1: IntPoly, p2: IntPoly, var) -> IntPoly:
    """Determinant of the Sylvester matrix of p1 and p2 with respect to ``var``."""
    if p1.degree(var) == 0 or p2.degree(var) == 0:
        raise DegreeError(f"both polynomials must have positive degree in {var}")
    return bareiss_determinant(sylvester_matrix(p1, p2, var))


def circle_resultant(p: IntPoly, x_var, y_var) -> IntPoly:
    """Resultant of p and y^2 + x^2 - 1 in y, by reduction modulo the circle.

    With p = a + b y modulo the circle and roots y1, y2 = -y1 of the monic
    quadratic, the resultant is p(y1) p(y2) = a^2 + b^2 (x^2 - 1). A p free
    of y gives p^2, the 2x2 Sylvester determinant.
    """
    red = p.reduce_circle(x_var, y_var)
    coeffs = red.coeffs_in(y_var)
    a = coeffs[0]
    b = coeffs[1] if len(coeffs) > 1 else IntPoly()
    x2m1 = IntPoly.var(x_var, 2) - 1
    out = a.square()
    if b:
        out = out + b.square() * x2m1
    return out


# ----- epsilon-quadratic split of the resultant ------------------------------

@dataclass(frozen=True)
class ResultantDecomposition:
    """R_eps = R + eps R1 + eps^2 R2 for the resultant of (p - eps, circle)."""

    R: IntPoly
    R1: IntPoly
    R2: IntPoly
    x_var: str
    y_var: str
    degree_y: int

    def reconstruct(self, eps: int) -> IntPoly:
        return self.R + self.R1 * eps + self.R2 * (eps * eps)

    def heights(self) -> tuple[int, int, int]:
        return (self.R.height(), self.R1.height(), self.R2.height())


def lemma_a_decompose(p: IntPoly, x_var="x_a", y_var="y_a", kernel: str = "circle") -> ResultantDecomposition:
    """Split the resultant of (p - eps, y^2 + x^2 - 1) by powers of eps.

    R_eps is quadratic in eps since p - eps fills two rows of the Sylvester
    matrix, so the three coefficients are interpolated exactly from
    eps = 0, 1, -1. ``kernel`` chooses the resultant routine ("circle" or
    "sylvester").
    """
    r = p.degree(y_var)
    if r == 0:
        raise DegreeError(f"polynomial is constant in {y_var}")
    c = circle(x_var, y_var)
    if kernel == "circle":
        def res(q):
            return circle_resultant(q, x_var, y_var)
    elif kernel == "sylvester":
        def res(q):
            return resultant(q, c, y_var)
    else:
        raise ValueError(f"unknown kernel {kernel!r}")
    r0 = res(p)
    rp = res(p - 1)
    rm = res(p + 1)
    R1 = (rp - rm).exact_div_int(2)
    R2 = (rp + rm - r0 * 2).exact_div_int(2)
    return ResultantDecomposition(r0, R1, R2, VARIABLES[var_index(x_var)], VARIABLES[var_index(y_var)], r)


def coefficient_sup_bound(p: IntPoly, y_var) -> int:
    """max_l of the coefficient 1-norm of p_l; bounds max |p_l| on the cube."""
    return max((sum(abs(c) for c in pl.terms.values()) for pl in p.coeffs_in(y_var)), default=0)


def _cube_values(poly: IntPoly, variables, grid: int):
    axis = np.linspace(-1.0, 1.0, grid)
    if not variables:
        return np.array([float(poly.constant_term())])
    mesh = np.meshgrid(*([axis] * len(variables)), indexing="ij")
    vals = {v: m.ravel() for v, m in zip(variables, mesh)}
    out = poly.evaluate_float(vals)
    return np.broadcast_to(np.asarray(out, dtype=float), mesh[0].ravel().shape)


def verify_height_bounds(d: ResultantDecomposition, r: int, H: int, grid: int = 21) -> dict:
    """Compare max |R_i| on a grid lattice of [-1, 1]^k with 2^r (r H)^(2-i)."""
    variables = sorted(
        set(d.R.variables()) | set(d.R1.variables()) | set(d.R2.variables()),
        key=VARIABLES.index,
    )
    rows = []
    ok = True
    for i, Ri in enumerate((d.R, d.R1, d.R2)):
        observed = float(np.max(np.abs(_cube_values(Ri, variables, grid)))) if Ri else 0.0
        bound = float(2**r * (r * H) ** (2 - i))
        holds = observed <= bound
        ok &= holds
        rows.append({"i": i, "observed_max": observed, "bound": bound, "holds": holds})
    return {"grid": grid, "variables": variables, "r": r, "H": H, "rows": rows, "holds": ok}


# ----- squared integral ------------------------------------------------------

@dataclass(frozen=True)
class IntegratedSquare:
    """int_{-1}^{1} r^2 d(var) = scaled / denominator exactly."""

    scaled: IntPoly
    denominator: int
    var: str
    factorial_arg: int | None = None

    def rational_terms(self) -> dict:
        return {e: Fraction(c, self.denominator) for e, c in self.scaled.items()}

    def is_zero(self) -> bool:
        return self.scaled.is_zero()

    def value(self) -> Fraction:
        """The integral as a number, when no other variable remains."""
        if not self.scaled.is_constant():
            raise ValueError("integral still depends on other variables")
        return Fraction(self.scaled.constant_term(), self.denominator)


def integrate_square(r: IntPoly, var, factorial_arg: int | None = None) -> IntegratedSquare:
    """Exact int_{-1}^{1} r^2 d(var), scaled by the lcm of its denominators.

    If ``factorial_arg`` is given, asserts the lcm divides factorial_arg!, so
    scaling by the factorial also yields integer coefficients.
    """
    num, den = r.square().integrate(var)
    if factorial_arg is not None and math.factorial(factorial_arg) % den:
        raise AssertionError(f"denominator lcm {den} does not divide {factorial_arg}!")
    return IntegratedSquare(num, den, VARIABLES[var_index(var)], factorial_arg)


# ----- Markov-type coefficient bounds ---------------------------------------

def markov_check(coeffs, n_grid: int = 4001) -> dict:
    """Sampled check of max|F'| <= deg^2 max|F| on [-1, 1] (low-to-high coefficients)."""
    F = np.polynomial.Polynomial(np.asarray(coeffs, dtype=float))
    deg = max(F.degree(), 0)
    xs = np.linspace(-1.0, 1.0, n_grid)
    fmax = float(np.max(np.abs(F(xs))))
    dmax = float(np.max(np.abs(F.deriv()(xs)))) if deg else 0.0
    return {"degree": deg, "max_f": fmax, "max_df": dmax, "holds": dmax <= deg * deg * fmax * (1 + 1e-12) + 1e-300}


def _log10_factorial(k: int) -> float:
    return math.lgamma(k + 1) / math.log(10)


def markov_coefficient_bounds(p: IntPoly, s: int, r: int, H: int, v_var, *,
                              scale_factorial: int | None = None, denominator: int = 1,
                              grid: int = 9, slices: int = 20, seed: int = 0) -> dict:
    """Check max |p_{1l}| <= ((4(s+r)-l)!)^3 / l! * 4^(r+1) (rH)^4 for p = sum_l p_{1l} v^l.

    ``p`` may be stored with a different integer scale than the factorial
    normalization; the compared value is (scale_factorial! / denominator) * p.
    Maxima over the cube of the other variables are taken on a grid lattice.
    Each row also carries the bound obtained by applying Markov's inequality
    l times to the sup bound of P1, which grows with l where the stated
    bound shrinks. Also samples Markov's inequality on random univariate
    slices of p.
    """
    if r < 1 or H < 1:
        raise ValueError("need r >= 1 and H >= 1")
    F = 4 * (s + r)
    if scale_factorial is None:
        scale_factorial = F
    log_scale = _log10_factorial(scale_factorial) - math.log10(denominator)
    parts = p.coeffs_in(v_var)
    others = sorted({v for pl in parts for v in pl.variables()}, key=VARIABLES.index)
    rows = []
    ok = markov_bound_ok = True
    for l, pl in enumerate(parts):
        if pl.is_zero():
            continue
        if l > F:
            rows.append({"l": l, "holds": False, "reason": "degree exceeds 4(s+r)"})
            ok = markov_bound_ok = False
            continue
        observed = float(np.max(np.abs(_cube_values(pl, others, grid))))
        log_obs = (math.log10(observed) + log_scale) if observed > 0 else -math.inf
        log_bound = (3 * _log10_factorial(F - l) - _log10_factorial(l)
                     + (r + 1) * math.log10(4) + 4 * math.log10(r * H))
        # l-fold Markov from max|P1| <= F! 4^(r+1) (rH)^4 gives (F!/(F-l)!)^2 / l! times that
        log_markov = (2 * (_log10_factorial(F) - _log10_factorial(F - l)) - _log10_factorial(l)
                      + _log10_factorial(F) + (r + 1) * math.log10(4) + 4 * math.log10(r * H))
        holds = log_obs <= log_bound
        ok &= holds
        markov_bound_ok &= log_obs <= log_markov
        rows.append({"l": l, "log10_observed": log_obs, "log10_bound": log_bound, "holds": holds,
                     "log10_markov_bound": log_markov, "holds_markov_bound": log_obs <= log_markov})
    rng = np.random.default_rng(seed)
    markov_rows = []
    variables = p.variables()
    for _ in range(slices if variables else 0):
        free = variables[int(rng.integers(len(variables)))]
        point = {v: float(rng.uniform(-1, 1)) for v in variables if v != free}
        coeffs = []
        for c in p.coeffs_in(free):
            coeffs.append(float(c.evaluate_float(point)) if c else 0.0)
        markov_rows.append(markov_check(coeffs))
    markov_ok = all(m["holds"] for m in markov_rows)
    return {"s": s, "r": r, "H": H, "rows": rows, "holds": ok, "markov_bound_holds": markov_bound_ok,
            "markov_slices": len(markov_rows), "markov_holds": markov_ok}


# ----- the chain -----------------------------------------------------------

def _stage_info(name: str, p: IntPoly) -> dict:
    h = p.height()
    return {
        "name": name,
        "terms": len(p),
        "degrees": dict(zip(VARIABLES, p.degrees())),
        "total_degree": p.total_degree(),
        "height_bits": h.bit_length(),
        "log10_height": (math.log10(h) if h else None),
    }


def _log10(x) -> float:
    return float(mpmath.log10(x))


def chain_thresholds(n: int, D: float, rho1: float = 1 / 3, rho2: float = 1 / 3) -> dict:
    """log10 of the thresholds delta, delta_1, delta_2 for word length n.

    delta and delta_1 follow the stage-one and stage-two formulas; the
    constants rho1, rho2 are existence-only, and delta_2 is recorded as
    D^(-rho2 n^2).
    """
    mp = mpmath.mp
    with mpmath.workdps(50):
        Dm = mp.mpf(D)
        H = mp.mpf(height_bound(n))
        tau = Dm ** (-mp.mpf(n * n) / 3)
        delta = tau * (2 ** (2 * n) * (2 * n * H) + 2 ** (2 * n) * (2 * n * H) ** 2 * tau)
        H1 = mp.factorial(16 * n) ** 3 * mp.mpf(4) ** (2 * n + 1) * (2 * n * H) ** 4
        tau1 = Dm ** (-rho1 * n * n)
        delta1 = tau1 * (mp.mpf(2) ** (32 * n) * 16 * n * H1
                         + mp.mpf(2) ** (32 * n) * (16 * n * H1) ** 2 * tau1)
        delta2 = Dm ** (-rho2 * n * n)
        return {
            "D": D, "rho1": rho1, "rho2": rho2,
            "log10_delta": _log10(delta),
            "log10_delta1": _log10(delta1),
            "log10_delta2": _log10(delta2),
            "log10_H": _log10(H),
            "log10_H1": _log10(H1),
        }


@dataclass
class ChainRecord:
    word: str
    n: int
    trivial: bool
    stages: list = field(default_factory=list)
    thresholds: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    certificate: dict = field(default_factory=dict)
    polys: dict = field(default_factory=dict, repr=False)

    def final(self) -> IntPoly | None:
        return self.polys.get("R2")

    def to_dict(self) -> dict:
        out = {
            "word": self.word,
            "n": self.n,
            "trivial": self.trivial,
            "stages": self.stages,
            "thresholds": self.thresholds,
            "bounds": self.bounds,
            "certificate": self.certificate,
        }
        R2 = self.final()
        if R2 is not None:
            text = R2.to_text()
            out["R2_sha256"] = hashlib.sha256(text.encode()).hexdigest()
            out["R2_coefficients"] = [str(c.constant_term()) for c in R2.coeffs_in("x_g")]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def elimination_chain(word: WordIndex, D: float = 5.0, n: int | None = None, *,
                      rho1: float = 1 / 3, rho2: float = 1 / 3,
                      reduce_circles: bool = False, reduce_P: bool = True) -> ChainRecord:
    """Run the three eliminations on build_P(word).

    ``reduce_P=False`` starts from the unreduced sum of squares instead of
    the circle normal form; both describe the same function on the torus.

    Stage polynomials are kept reduced modulo the circle relations of the
    variables not yet eliminated (``reduce_circles``). This leaves their
    values on the torus unchanged and changes the final R2 at most by a
    positive rational factor. Words longer than 4 letters are refused.
    """
    length = word_length(word)
    if n is None:
        n = length
    if n != length:
        raise EliminationError(f"n = {n} does not match the word length {length}")
    if n > MAX_CHAIN_LENGTH:
        raise ChainSizeError(f"elimination chain is capped at length {MAX_CHAIN_LENGTH}, got {n}")
    if n < 1:
        raise EliminationError("empty word")
    P = build_P(word, reduce=reduce_P)
    record = ChainRecord(word=word.to_text(), n=n, trivial=False, thresholds=chain_thresholds(n, D, rho1, rho2))
    record.stages.append(_stage_info("P", P))
    if P.is_constant():
        record.trivial = True
        # P == 0 happens exactly for words without A-letters: W does not depend on alpha
        record.certificate = {"positive": P.constant_term() > 0, "constant_P": P.constant_term(),
                              "alpha_free": P.is_zero()}
        record.polys["P"] = P
        return record

    def tidy(p, remaining):
        return p.reduce_circles(remaining) if reduce_circles else p

    rest_a = (("x_b", "y_b"), ("x_g", "y_g"))
    rest_b = (("x_g", "y_g"),)

    # stage 1: eliminate (x_a, y_a)
    if P.degree("y_a") >= 1:
        dec = lemma_a_decompose(P, "x_a", "y_a")
        R = dec.R
        record.stages.append({"name": "decomposition", "heights_bits": [h.bit_length() for h in dec.heights()],
                              "degree_y": dec.degree_y})
    else:
        R = circle_resultant(P, "x_a", "y_a")
    R = tidy(R, rest_a)
    _require_nonzero(R, "R")
    record.stages.append(_stage_info("R", R))
    I1 = integrate_square(R, "x_a", factorial_arg=16 * n)
    P1 = tidy(I1.scaled, rest_a)
    _require_nonzero(P1, "P1")
    info = _stage_info("P1", P1)
    info["lcm"] = I1.denominator
    record.stages.append(info)

    # stage 2: eliminate (x_b, y_b)
    R1 = tidy(circle_resultant(P1, "x_b", "y_b"), rest_b)
    _require_nonzero(R1, "R1")
    record.stages.append(_stage_info("R1", R1))
    I2 = integrate_square(R1, "x_b", factorial_arg=128 * n)
    P2 = tidy(I2.scaled, rest_b)
    _require_nonzero(P2, "P2")
    info = _stage_info("P2", P2)
    info["lcm"] = I2.denominator
    record.stages.append(info)

    # stage 3: eliminate (x_g, y_g)
    R2 = circle_resultant(P2, "x_g", "y_g")
    _require_nonzero(R2, "R2")
    record.stages.append(_stage_info("R2", R2))
    I3 = integrate_square(R2, "x_g", factorial_arg=256 * n)
    value = I3.value()
    record.certificate = {
        "integral_numerator_bits": value.numerator.bit_length(),
        "integral_denominator": str(value.denominator),
        "log10_integral": math.log10(value.numerator) - math.log10(value.denominator) if value > 0 else None,
        "positive": value > 0,
        "integer_coefficients": True,
    }
    P1_total = P1.total_degree()
    R2_deg = R2.degree("x_g")
    record.bounds = {
        "P1_total_degree": P1_total, "P1_bound": 16 * n, "P1_ok": P1_total <= 16 * n,
        "R2_degree": R2_deg, "R2_bound": 128 * n, "R2_ok": R2_deg <= 128 * n,
        "R2_univariate": R2.variables() in ((), ("x_g",)),
    }
    record.polys.update({"P": P, "R": R, "P1": P1, "R1": R1, "P2": P2, "R2": R2})
    return record


def _require_nonzero(p: IntPoly, name: str):
    if p.is_zero():
        raise DegeneracyError(f"stage polynomial {name} vanished identically")
