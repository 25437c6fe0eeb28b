"""Unit quaternions, the two parameterized generators, and word evaluation.

The generator A rotates about the x-axis and B about an axis in the xy-plane
at angle gamma from it::

    A(alpha)       = cos(alpha) + i sin(alpha)
    B(beta, gamma) = cos(beta) + sin(beta) (i cos(gamma) + j sin(gamma))

Quaternions are stored as ``(w, x, y, z)``. The low-level helpers
(:func:`qmul`, :func:`fold_sq_distance`) accept floats or numpy arrays, so the
scalar path and the vectorized search perform bit-identical arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .words import WordIndex

TWO_PI = 2.0 * math.pi
RENORMALIZE_EVERY = 64


def qmul(a, b):
    """Hamilton product of two component 4-tuples (scalars or arrays)."""
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return (
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    )


def qadd(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3])


def qscale(a, s):
    return (a[0] * s, a[1] * s, a[2] * s, a[3] * s)


def qconj(a):
    return (a[0], -a[1], -a[2], -a[3])


def qnorm_sq(a):
    return a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3]


def fold_sq_distance(q, c):
    """min(|q - c|^2, |q + c|^2), the squared SO(3) distance of two lifts."""
    dm = (q[0] - c[0]) ** 2 + (q[1] - c[1]) ** 2 + (q[2] - c[2]) ** 2 + (q[3] - c[3]) ** 2
    dp = (q[0] + c[0]) ** 2 + (q[1] + c[1]) ** 2 + (q[2] + c[2]) ** 2 + (q[3] + c[3]) ** 2
    return np.minimum(dm, dp)


def lift_sq_distance(q, c):
    """|q - c|^2 for the given lifts, without double-cover folding."""
    return (q[0] - c[0]) ** 2 + (q[1] - c[1]) ** 2 + (q[2] - c[2]) ** 2 + (q[3] - c[3]) ** 2


@dataclass(frozen=True)
class UnitQuaternion:
    w: float
    x: float
    y: float
    z: float

    @classmethod
    def identity(cls) -> UnitQuaternion:
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_components(cls, comps, normalize: bool = True) -> UnitQuaternion:
        w, x, y, z = (float(c) for c in comps)
        if normalize:
            s = math.sqrt(w * w + x * x + y * y + z * z)
            if s == 0.0:
                raise ValueError("cannot normalize the zero quaternion")
            w, x, y, z = w / s, x / s, y / s, z / s
        return cls(w, x, y, z)

    @classmethod
    def from_axis_angle(cls, axis, angle: float) -> UnitQuaternion:
        """Quaternion of the rotation by ``angle`` about ``axis`` (half-angle convention)."""
        v = np.asarray(axis, dtype=float)
        v = v / np.linalg.norm(v)
        s = math.sin(angle / 2.0)
        return cls(math.cos(angle / 2.0), s * v[0], s * v[1], s * v[2])

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.w, self.x, self.y, self.z)

    def __iter__(self):
        return iter(self.as_tuple())

    def __mul__(self, other: UnitQuaternion) -> UnitQuaternion:
        return UnitQuaternion(*qmul(self.as_tuple(), other.as_tuple()))

    def __neg__(self) -> UnitQuaternion:
        return UnitQuaternion(-self.w, -self.x, -self.y, -self.z)

    def conjugate(self) -> UnitQuaternion:
        return UnitQuaternion(self.w, -self.x, -self.y, -self.z)

    inverse = conjugate

    def norm_sq(self) -> float:
        return qnorm_sq(self.as_tuple())

    def normalized(self) -> UnitQuaternion:
        return UnitQuaternion.from_components(self.as_tuple())

    def to_matrix(self) -> np.ndarray:
        """3x3 rotation matrix acting on column vectors."""
        w, x, y, z = self.as_tuple()
        return np.array(
            [
                [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
                [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
                [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
            ]
        )


@dataclass(frozen=True)
class RotationTriple:
    """A parameter point (alpha, beta, gamma), each reduced to [0, 2*pi)."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            object.__setattr__(self, name, reduce_angle(getattr(self, name)))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)


def reduce_angle(theta: float) -> float:
    t = math.fmod(float(theta), TWO_PI)
    if t < 0.0:
        t += TWO_PI
    if t >= TWO_PI:  # fmod of a value just below a multiple can round up
        t = 0.0
    return t


def generator_A(alpha: float) -> UnitQuaternion:
    return UnitQuaternion(math.cos(alpha), math.sin(alpha), 0.0, 0.0)


def generator_B(beta: float, gamma: float) -> UnitQuaternion:
    s = math.sin(beta)
    return UnitQuaternion(math.cos(beta), s * math.cos(gamma), s * math.sin(gamma), 0.0)


def _a_power(s, alpha):
    t = s * alpha
    return (np.cos(t), np.sin(t), 0.0 * t, 0.0 * t)


def _b_power(r, beta, gamma):
    t = r * beta
    st = np.sin(t)
    return (np.cos(t), st * np.cos(gamma), st * np.sin(gamma), 0.0 * st)


def _normalize(q):
    s = np.sqrt(qnorm_sq(q))
    return (q[0] / s, q[1] / s, q[2] / s, q[3] / s)


def _word_factors(word: WordIndex, alpha, beta, gamma):
    for s, r in word.blocks:
        if s:
            yield _a_power(s, alpha)
        if r:
            yield _b_power(r, beta, gamma)


def evaluate_components(word: WordIndex, alpha, beta, gamma):
    """Component tuple of the word's quaternion; arguments may be numpy arrays."""
    q = (1.0, 0.0, 0.0, 0.0)
    for count, f in enumerate(_word_factors(word, alpha, beta, gamma), start=1):
        q = qmul(q, f)
        if count % RENORMALIZE_EVERY == 0:
            q = _normalize(q)
    return _normalize(q)


def evaluate_word(word: WordIndex, point: RotationTriple) -> UnitQuaternion:
    comps = evaluate_components(word, point.alpha, point.beta, point.gamma)
    return UnitQuaternion(*(float(c) for c in comps))


def so3_distance(q: UnitQuaternion, c: UnitQuaternion) -> float:
    return math.sqrt(float(fold_sq_distance(q.as_tuple(), c.as_tuple())))


def frobenius_distance(q: UnitQuaternion, c: UnitQuaternion) -> float:
    """Frobenius norm of the difference of the two 3x3 rotation matrices."""
    return float(np.linalg.norm(q.to_matrix() - c.to_matrix()))


def rotation_angle(q: UnitQuaternion) -> float:
    """SO(3) rotation angle in [0, pi], folded through the double cover."""
    return 2.0 * math.acos(min(1.0, abs(q.w)))


def alpha_jets(word: WordIndex, alpha, beta, gamma):
    """Return (W, dW/dalpha, d2W/dalpha2) as component tuples.

    Jets are propagated through the product with the Leibniz rule, so the
    derivatives are exact up to rounding.
    """
    zero = 0.0 * (alpha + beta + gamma)
    one = 1.0 + zero
    W = (one, zero, zero, zero)
    dW = (zero, zero, zero, zero)
    d2W = (zero, zero, zero, zero)
    for s, r in word.blocks:
        if s:
            c, sn = np.cos(s * alpha), np.sin(s * alpha)
            F = (c + zero, sn + zero, zero, zero)
            dF = (-s * sn + zero, s * c + zero, zero, zero)
            d2F = (-s * s * c + zero, -s * s * sn + zero, zero, zero)
            W, dW, d2W = (
                qmul(W, F),
                qadd(qmul(dW, F), qmul(W, dF)),
                qadd(qadd(qmul(d2W, F), qscale(qmul(dW, dF), 2.0)), qmul(W, d2F)),
            )
        if r:
            G = _b_power(r, beta, gamma)
            W, dW, d2W = qmul(W, G), qmul(dW, G), qmul(d2W, G)
    return W, dW, d2W


def word_alpha_derivative(word: WordIndex, point: RotationTriple) -> np.ndarray:
    _, dW, _ = alpha_jets(word, point.alpha, point.beta, point.gamma)
    return np.array([float(c) for c in dW])


def word_alpha_second_derivative(word: WordIndex, point: RotationTriple) -> np.ndarray:
    _, _, d2W = alpha_jets(word, point.alpha, point.beta, point.gamma)
    return np.array([float(c) for c in d2W])


def alpha_derivative_sq(word: WordIndex, alpha, beta, gamma):
    """Squared norm of dW/dalpha; vectorized over array arguments."""
    _, dW, _ = alpha_jets(word, alpha, beta, gamma)
    return qnorm_sq(dW)
