"""Exact trigonometric polynomials attached to a word.

``symbolic_word`` writes the word's quaternion as four integer polynomials in
``(x_a, y_a, x_b, y_b, x_g, y_g) = (cos a, sin a, cos b, sin b, cos g, sin g)``.
``build_P`` gives the polynomial whose value on the torus is
``|dW/dalpha|^2``. ``leading_alpha_coefficient`` extracts the quaternion
coefficient of the top alpha-frequency, which is a product of nonvanishing
factors and therefore certifies that the word map is nondegenerate in alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .poly import IntPoly
from .rotation import evaluate_components
from .words import WordIndex, word_length


def multiple_angle(k: int, x_var="x_a", y_var="y_a") -> tuple[IntPoly, IntPoly]:
    """(cos k t, sin k t) as integer polynomials in (x, y) = (cos t, sin t).

    Expands (x + i y)^|k| by the binomial theorem; negative k flips the sine.
    """
    n = abs(k)
    cos_terms: dict = {}
    sin_terms: dict = {}
    for j in range(n + 1):
        b = math.comb(n, j)
        mono = IntPoly.monomial(1, {x_var: n - j, y_var: j})
        (key,) = mono.terms
        if j % 2 == 0:
            cos_terms[key] = b * (-1) ** (j // 2)
        else:
            sin_terms[key] = b * (-1) ** ((j - 1) // 2)
    c, s = IntPoly(cos_terms), IntPoly(sin_terms)
    if k < 0:
        s = -s
    return c, s


_ZERO = IntPoly()


@dataclass(frozen=True)
class QuaternionPoly:
    """Four IntPoly components (w, x, y, z) of a symbolic quaternion."""

    w: IntPoly = field(default_factory=IntPoly)
    x: IntPoly = field(default_factory=IntPoly)
    y: IntPoly = field(default_factory=IntPoly)
    z: IntPoly = field(default_factory=IntPoly)

    @classmethod
    def one(cls) -> QuaternionPoly:
        return cls(IntPoly.constant(1), IntPoly(), IntPoly(), IntPoly())

    def components(self) -> tuple[IntPoly, IntPoly, IntPoly, IntPoly]:
        return (self.w, self.x, self.y, self.z)

    def __add__(self, other: QuaternionPoly) -> QuaternionPoly:
        return QuaternionPoly(*(a + b for a, b in zip(self.components(), other.components())))

    def scale(self, c: int) -> QuaternionPoly:
        return QuaternionPoly(*(a * c for a in self.components()))

    def __mul__(self, other: QuaternionPoly) -> QuaternionPoly:
        a0, a1, a2, a3 = self.components()
        b0, b1, b2, b3 = other.components()

        def prod(p, q):
            return p * q if (p and q) else _ZERO

        return QuaternionPoly(
            prod(a0, b0) - prod(a1, b1) - prod(a2, b2) - prod(a3, b3),
            prod(a0, b1) + prod(a1, b0) + prod(a2, b3) - prod(a3, b2),
            prod(a0, b2) - prod(a1, b3) + prod(a2, b0) + prod(a3, b1),
            prod(a0, b3) + prod(a1, b2) - prod(a2, b1) + prod(a3, b0),
        )

    def norm_sq(self) -> IntPoly:
        total = IntPoly()
        for c in self.components():
            if c:
                total = total + c.square()
        return total

    def is_zero(self) -> bool:
        return not any(self.components())

    def evaluate(self, alpha=0.0, beta=0.0, gamma=0.0) -> np.ndarray:
        vals = (
            np.cos(alpha), np.sin(alpha),
            np.cos(beta), np.sin(beta),
            np.cos(gamma), np.sin(gamma),
        )
        return np.array([c.evaluate_float(vals) for c in self.components()])


def a_factor(s: int) -> QuaternionPoly:
    c, sn = multiple_angle(s, "x_a", "y_a")
    return QuaternionPoly(c, sn)


def a_factor_derivative(s: int) -> QuaternionPoly:
    c, sn = multiple_angle(s, "x_a", "y_a")
    return QuaternionPoly(-sn * s, c * s)


def b_factor(r: int) -> QuaternionPoly:
    c, sn = multiple_angle(r, "x_b", "y_b")
    return QuaternionPoly(c, sn * IntPoly.var("x_g"), sn * IntPoly.var("y_g"))


def b_commuting_part(r: int) -> QuaternionPoly:
    """cos(r b) + i sin(r b) cos(g): the part of B^r commuting with A."""
    c, sn = multiple_angle(r, "x_b", "y_b")
    return QuaternionPoly(c, sn * IntPoly.var("x_g"))


def b_j_part(r: int) -> QuaternionPoly:
    """j sin(r b) sin(g): the part of B^r anticommuting with A."""
    _, sn = multiple_angle(r, "x_b", "y_b")
    return QuaternionPoly(IntPoly(), IntPoly(), sn * IntPoly.var("y_g"))


def symbolic_word(word: WordIndex) -> QuaternionPoly:
    q = QuaternionPoly.one()
    for s, r in word.blocks:
        if s:
            q = q * a_factor(s)
        if r:
            q = q * b_factor(r)
    return q


def symbolic_alpha_derivative(word: WordIndex) -> QuaternionPoly:
    """d/dalpha of the symbolic word, by the Leibniz rule over A-blocks."""
    W = QuaternionPoly.one()
    dW = QuaternionPoly()
    for s, r in word.blocks:
        if s:
            F, dF = a_factor(s), a_factor_derivative(s)
            dW = dW * F + W * dF if not dW.is_zero() else W * dF
            W = W * F
        if r:
            G = b_factor(r)
            W = W * G
            if not dW.is_zero():
                dW = dW * G
    return dW


def build_P(word: WordIndex, reduce: bool = True) -> IntPoly:
    """Integer polynomial P with P(cos a, sin a, ...) = |dW/dalpha|^2.

    By default the sum of squares is put in normal form modulo the three
    circle relations (every y-variable to degree <= 1), so that e.g. the word
    A gives the constant 1 rather than x_a^2 + y_a^2. ``reduce=False`` returns
    the raw sum of squares; both agree on the torus.
    """
    if word_length(word) == 0:
        raise ValueError("build_P needs a nonempty word")
    P = symbolic_alpha_derivative(word).norm_sq()
    return P.reduce_circles() if reduce else P


def coefficient_height(p: IntPoly) -> int:
    return p.height()


def height_bound(n: int) -> int:
    """(2^n n)^2."""
    return (2**n * n) ** 2


@dataclass(frozen=True)
class FrequencyCoefficient:
    """Quaternion coefficient of exp(i * frequency * alpha) (exponential on the right)."""

    coefficient: QuaternionPoly
    frequency: int
    factors: tuple[QuaternionPoly, ...]

    def evaluate(self, beta: float, gamma: float) -> np.ndarray:
        return self.coefficient.evaluate(0.0, beta, gamma)

    def norm_sq(self) -> IntPoly:
        return self.coefficient.norm_sq()

    def factor_norms(self) -> list[IntPoly]:
        return [f.norm_sq() for f in self.factors]


def leading_alpha_coefficient(word: WordIndex) -> FrequencyCoefficient:
    """Coefficient of the highest alpha-frequency sign(s_m) * sum |s_p|.

    Moving each exp(i s alpha) to the right through the following B-block, the
    commuting part keeps the frequency sign and the j-part flips it. The top
    frequency is reached by keeping the sign exactly when s_p and s_{p+1}
    agree; the final B-block (if any) contributes its commuting part. A
    leading B-block (s_1 = 0) is alpha-free and multiplies on the left.
    """
    blocks = list(word.blocks)
    if not word.has_a():
        raise ValueError("word has no A-letters; alpha-frequency is zero")
    factors: list[QuaternionPoly] = []
    if blocks[0][0] == 0:
        factors.append(b_factor(blocks[0][1]))
        blocks = blocks[1:]
    m = len(blocks)
    for p, (s, r) in enumerate(blocks):
        if p < m - 1:
            same = (s > 0) == (blocks[p + 1][0] > 0)
            factors.append(b_commuting_part(r) if same else b_j_part(r))
        elif r:
            factors.append(b_commuting_part(r))
    coeff = QuaternionPoly.one()
    for f in factors:
        coeff = coeff * f
    s_last = blocks[-1][0]
    freq = (1 if s_last > 0 else -1) * sum(abs(s) for s, _ in blocks)
    return FrequencyCoefficient(coeff, freq, tuple(factors))


def dft_alpha_coefficient(word: WordIndex, freq: int, beta: float, gamma: float,
                          n_samples: int | None = None) -> np.ndarray:
    """Numerical coefficient of exp(i freq alpha) in alpha -> W(alpha, beta, gamma).

    Writes W = a(alpha) + j b(alpha) with a = w + i x and b = y - i z, both
    commuting with exp(i alpha), and takes the DFT of each over equispaced
    alpha. Returns the quaternion (Re a_f, Im a_f, Re b_f, -Im b_f).
    """
    top = sum(abs(s) for s in word.a_exponents())
    if abs(freq) > top:
        raise ValueError(f"|freq| = {abs(freq)} exceeds the alpha-degree {top}")
    N = n_samples or (2 * top + 2)
    if N < 2 * top + 1:
        raise ValueError("too few samples to resolve all frequencies")
    alphas = 2.0 * np.pi * np.arange(N) / N
    w, x, y, z = evaluate_components(word, alphas, beta, gamma)
    a = np.asarray(w + 0 * alphas) + 1j * np.asarray(x + 0 * alphas)
    b = np.asarray(y + 0 * alphas) - 1j * np.asarray(z + 0 * alphas)
    phase = np.exp(-1j * freq * alphas)
    af = np.mean(a * phase)
    bf = np.mean(b * phase)
    return np.array([af.real, af.imag, bf.real, -bf.imag])


def freeness_certificate(word: WordIndex) -> dict:
    """Symbolic check that the top alpha-frequency coefficient is not identically zero.

    Verifies that the coefficient's norm polynomial equals the product of the
    factor norm polynomials and that each factor norm is a nonzero polynomial.
    """
    fc = leading_alpha_coefficient(word)
    norms = fc.factor_norms()
    product = IntPoly.constant(1)
    for nrm in norms:
        product = product * nrm
    total = fc.norm_sq()
    return {
        "word": word.to_text(),
        "frequency": fc.frequency,
        "multiplicative": total == product,
        "factors_nonzero": all(not nrm.is_zero() for nrm in norms),
        "nonzero": not total.is_zero(),
    }
