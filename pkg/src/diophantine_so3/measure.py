"""Measure estimates for sublevel sets on the parameter torus.

All torus measures are normalized so that T^3 (or the sub-torus a word
actually depends on) has mass 1. Grid estimates use the midpoint lattice and
are deterministic; Monte Carlo estimates draw from numpy's counter-based
Philox generator in fixed-size chunks, each chunk on its own jumped stream,
so the result does not depend on the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .rotation import (
    TWO_PI,
    UnitQuaternion,
    alpha_derivative_sq,
    evaluate_components,
    fold_sq_distance,
    lift_sq_distance,
)
from .words import WordIndex, count_reduced_words, enumerate_words, word_length

MC_CHUNK = 1 << 16
GRID_CHUNK = 1 << 18
DEFAULT_UNION_BUDGET = count_reduced_words(8)
METRICS = ("lift", "so3")


class DomainError(ValueError):
    pass


class BudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class MeasureEstimate:
    """Normalized measure of a sublevel set with its provenance.

    ``value`` is the fraction of the domain; ``absolute`` multiplies back by
    the domain volume (used by the 1-D interval estimates).
    """

    value: float
    method: str
    dimension: int
    resolution: int | None = None
    samples: int | None = None
    seed: int | None = None
    half_width: float = 0.0
    domain_volume: float = 1.0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (0.0 <= self.value <= 1.0):
            raise ValueError(f"measure fraction {self.value} outside [0, 1]")

    @property
    def absolute(self) -> float:
        return self.value * self.domain_volume

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class PhiSpec:
    word: WordIndex
    target: UnitQuaternion
    threshold: float
    metric: str = "lift"

    def __post_init__(self):
        if not self.threshold > 0:
            raise ValueError("threshold must be positive")
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}")


class FlaggedBound(float):
    """A float carrying whether the bound was vacuous (eps > norm)."""

    vacuous: bool

    def __new__(cls, value: float, vacuous: bool = False):
        obj = super().__new__(cls, value)
        obj.vacuous = vacuous
        return obj


def dm_bound(n: int, eps: float, norm_F: float, interval_len: float, strict: bool = False) -> FlaggedBound:
    """2n (n+1)^(1/n) (eps/norm_F)^(1/n) |B| for a degree-n polynomial.

    If eps > norm_F the inequality says nothing; ``strict`` raises, otherwise
    the trivial bound |B| is returned with ``vacuous = True``.
    """
    if n < 1:
        raise DomainError("degree must be >= 1")
    if eps <= 0 or norm_F <= 0 or interval_len <= 0:
        raise DomainError("eps, norm_F and interval_len must be positive")
    if eps > norm_F:
        if strict:
            raise DomainError(f"eps = {eps} exceeds the sup norm {norm_F}")
        return FlaggedBound(interval_len, vacuous=True)
    return FlaggedBound(2 * n * (n + 1) ** (1 / n) * (eps / norm_F) ** (1 / n) * interval_len)


def _bracketed_root(g, lo: float, hi: float):
    # vectorized and scalar libm calls may differ in the last ulp, so the
    # bracket is re-checked with the scalar function
    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if (glo > 0) == (ghi > 0):
        return None
    return brentq(g, lo, hi, xtol=1e-15)


def _level_roots(f, xs, fx, level, out):
    """Append to ``out`` the roots of f - level located from grid values."""

    def g(t):
        return float(f(t)) - level

    h = fx - level
    sign = np.sign(h)
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        r = _bracketed_root(g, xs[i], xs[i + 1])
        if r is not None:
            out.append(r)
    # a cell whose midpoint has the other sign hides two crossings
    mids = 0.5 * (xs[:-1] + xs[1:])
    hmid = np.asarray(f(mids), dtype=float) - level
    flip = (sign[:-1] == sign[1:]) & (sign[:-1] != 0) & (np.sign(hmid) == -sign[:-1])
    for i in np.nonzero(flip)[0]:
        for lo, hi in ((xs[i], mids[i]), (mids[i], xs[i + 1])):
            r = _bracketed_root(g, lo, hi)
            if r is not None:
                out.append(r)
    # tangential double crossings hide between grid points near discrete extrema
    interior = np.arange(1, len(xs) - 1)
    hm, h0, hp = h[:-2], h[1:-1], h[2:]
    # a smooth dip below the grid values is at most about one neighbour difference
    swing = np.maximum(np.abs(hm - h0), np.abs(hp - h0))
    near = np.abs(h0) <= swing
    for sgn, mask in ((1.0, (h0 < hm) & (h0 <= hp) & (h0 > 0) & near),
                      (-1.0, (h0 > hm) & (h0 >= hp) & (h0 < 0) & near)):
        for i in interior[mask]:
            res = minimize_scalar(lambda t: sgn * g(t), bounds=(xs[i - 1], xs[i + 1]),
                                  method="bounded", options={"xatol": 1e-14})
            if sgn * res.fun < 0:
                for lo, hi in ((xs[i - 1], res.x), (res.x, xs[i + 1])):
                    r = _bracketed_root(g, lo, hi)
                    if r is not None:
                        out.append(r)


def _piece_length(f_levels, predicate, xs) -> tuple[float, int]:
    """Length of {x : predicate(x)} on [xs[0], xs[-1]].

    ``f_levels`` lists (f, level) pairs whose crossings bound the set, so the
    predicate is constant between consecutive breakpoints.
    """
    roots: list[float] = []
    for f, level in f_levels:
        _level_roots(f, xs, np.asarray(f(xs), dtype=float), level, roots)
    pts = np.unique(np.concatenate([xs, np.asarray(roots, dtype=float)]))
    mids = 0.5 * (pts[:-1] + pts[1:])
    return float(np.sum(np.diff(pts)[predicate(mids)])), len(roots)


def sublevel_measure_1d(f: Callable, B: tuple[float, float], eps: float, resolution: int = 10**5) -> MeasureEstimate:
    """Measure of {x in B : |f(x)| <= eps} for a continuous vectorized ``f``.

    The grid locates the crossings of f = +-eps (including pairs hidden near
    local extrema), brentq pins them down, and each piece between
    consecutive breakpoints is classified at its midpoint.
    """
    if resolution < 1000:
        raise ValueError("resolution must be at least 1000")
    a, b = float(B[0]), float(B[1])
    if not b > a:
        raise ValueError("interval must have positive length")
    xs = np.linspace(a, b, resolution + 1)
    levels = [(f, eps), (f, -eps)] if eps > 0 else [(f, 0.0)]
    length, crossings = _piece_length(levels, lambda m: np.abs(np.asarray(f(m), dtype=float)) <= eps, xs)
    frac = min(1.0, max(0.0, length / (b - a)))
    return MeasureEstimate(value=frac, method="grid", dimension=1, resolution=resolution,
                           domain_volume=b - a, extra={"crossings": crossings})


def _poly_callable(coeffs):
    # coefficients in ascending order c0 + c1 x + ...
    rev = np.asarray(coeffs, dtype=float)[::-1]
    return lambda x: np.polyval(rev, x)


def poly_sup_norm(coeffs, B: tuple[float, float], grid: int = 10**4) -> float:
    """max |F| on B: grid maximum refined 10x around the argmax (never above the true max)."""
    f = _poly_callable(coeffs)
    xs = np.linspace(B[0], B[1], grid + 1)
    vals = np.abs(f(xs))
    i = int(np.argmax(vals))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, grid)]
    fine = np.linspace(lo, hi, 21)
    return float(max(vals[i], np.max(np.abs(f(fine)))))


def _degree(coeffs) -> int:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return len(c) - 1


def check_dm_lemma(coeffs: Sequence[float], B: tuple[float, float], eps: float, resolution: int = 10**5) -> dict:
    """Compare the measured eps-sublevel measure of F with the DM bound.

    ``coeffs`` are ascending (c0 + c1 x + ...). The sup norm is a lower
    estimate, which can only enlarge the bound.
    """
    n = _degree(coeffs)
    if n < 1:
        raise DomainError("polynomial degree must be >= 1")
    norm = poly_sup_norm(coeffs, B)
    length = B[1] - B[0]
    bound = dm_bound(n, eps, norm, length)
    measured = sublevel_measure_1d(_poly_callable(coeffs), B, eps, resolution).absolute
    return {"degree": n, "eps": eps, "norm": norm, "measured": measured, "bound": float(bound),
            "vacuous": bound.vacuous, "ok": measured <= bound}


def word_parameters(word: WordIndex) -> tuple[bool, bool, bool]:
    """Which of (alpha, beta, gamma) the word's value can depend on."""
    has_a = word.has_a()
    has_b = any(r for _, r in word.blocks)
    return (has_a, has_b, has_b)


def _grid_axes(active: tuple[bool, ...], resolution: int):
    d = sum(active)
    per = max(1, int(round(resolution ** (1.0 / d)))) if d else 1
    axes = []
    for act in active:
        if act:
            axes.append((np.arange(per) + 0.5) * (TWO_PI / per))
        else:
            axes.append(np.zeros(1))
    return axes, per, d


def _grid_count(indicator, active, resolution: int) -> tuple[int, int, int, int]:
    """Count lattice points where ``indicator(alpha, beta, gamma)`` holds."""
    axes, per, d = _grid_axes(active, resolution)
    ga, gb, gg = axes
    total = len(ga) * len(gb) * len(gg)
    # the (beta, gamma) plane is materialized once, alpha is streamed
    bb, gg2 = np.meshgrid(gb, gg, indexing="ij")
    bb, gg2 = bb.ravel(), gg2.ravel()
    step = max(1, GRID_CHUNK // len(bb))
    count = 0
    for start in range(0, len(ga), step):
        a = ga[start:start + step]
        A = np.repeat(a, len(bb))
        Bv = np.tile(bb, len(a))
        Gv = np.tile(gg2, len(a))
        count += int(np.count_nonzero(indicator(A, Bv, Gv)))
    return count, total, per, d


def _mc_count(indicator, samples: int, seed: int, workers: int = 1) -> int:
    nchunks = -(-samples // MC_CHUNK)

    def chunk(j: int) -> int:
        size = min(MC_CHUNK, samples - j * MC_CHUNK)
        rng = np.random.Generator(np.random.Philox(seed).jumped(j))
        pts = rng.random((3, size)) * TWO_PI
        return int(np.count_nonzero(indicator(pts[0], pts[1], pts[2])))

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            return sum(ex.map(chunk, range(nchunks)))
    return sum(chunk(j) for j in range(nchunks))


def _estimate(indicator, active, method: str, resolution: int | None, samples: int | None,
              seed: int, workers: int, extra: dict | None = None) -> MeasureEstimate:
    extra = dict(extra or {})
    if method == "grid":
        res = resolution or 10**6
        count, total, per, d = _grid_count(indicator, active, res)
        extra.update({"points_per_axis": per, "active_parameters": d, "count": count})
        return MeasureEstimate(value=count / total, method="grid", dimension=max(d, 1),
                               resolution=total, extra=extra)
    if method in ("monte-carlo", "mc"):
        N = samples or 10**6
        count = _mc_count(indicator, N, seed, workers)
        p = count / N
        extra["count"] = count
        return MeasureEstimate(value=p, method="monte-carlo", dimension=3, samples=N, seed=seed,
                               half_width=1.96 * math.sqrt(p * (1 - p) / N), extra=extra)
    raise ValueError(f"unknown method {method!r}")


def _distance_indicator(word: WordIndex, target, threshold: float, metric: str):
    c = tuple(target)
    dist = lift_sq_distance if metric == "lift" else fold_sq_distance
    t2 = threshold * threshold

    def ind(a, b, g):
        return dist(evaluate_components(word, a, b, g), c) <= t2

    return ind


def phi_measure(spec: PhiSpec, method: str = "grid", resolution: int | None = None,
                samples: int | None = None, seed: int = 0, workers: int = 1) -> MeasureEstimate:
    """Fraction of the torus where the word is within ``spec.threshold`` of the target.

    The default ``lift`` metric is |W - C| for the given lift C; ``so3``
    folds over +-C. The grid is spread over the parameters the word depends
    on, so word A gets a 1-D lattice with all ``resolution`` points.
    """
    ind = _distance_indicator(spec.word, spec.target, spec.threshold, spec.metric)
    return _estimate(ind, word_parameters(spec.word), method, resolution, samples, seed, workers,
                     {"word": spec.word.to_text(), "threshold": spec.threshold, "metric": spec.metric})


def phi_alpha_measure(word: WordIndex, threshold: float, method: str = "grid", resolution: int | None = None,
                      samples: int | None = None, seed: int = 0, workers: int = 1) -> MeasureEstimate:
    """Fraction of the torus where |dW/dalpha|^2 <= threshold."""
    if not threshold > 0:
        raise ValueError("threshold must be positive")

    def ind(a, b, g):
        return alpha_derivative_sq(word, a, b, g) <= threshold

    return _estimate(ind, word_parameters(word), method, resolution, samples, seed, workers,
                     {"word": word.to_text(), "threshold": threshold})


def phi_union_measure(n: int, D: float, C: UnitQuaternion, budget: int = DEFAULT_UNION_BUDGET,
                      method: str = "monte-carlo", resolution: int | None = None, samples: int | None = None,
                      seed: int = 0, threshold: float | None = None, metric: str = "lift",
                      workers: int = 1) -> MeasureEstimate:
    """Measure of the union over all length-n words, plus the sum of the individual measures.

    The threshold defaults to D^(-n^2). ``budget`` caps the number of words.
    Both numbers come from the same sample points, so union <= sum holds exactly.
    """
    nwords = count_reduced_words(n)
    if nwords > budget:
        raise BudgetError(f"{nwords} words of length {n} exceed the budget {budget}")
    t = threshold if threshold is not None else D ** (-(n * n))
    if not t > 0:
        raise ValueError(f"threshold underflowed to {t}; pass an explicit threshold")
    words = list(enumerate_words(n))
    inds = [_distance_indicator(w, C, t, metric) for w in words]
    individual = [0] * len(words)

    def union_ind(a, b, g):
        hit = np.zeros(np.shape(a), dtype=bool)
        for i, ind in enumerate(inds):
            h = ind(a, b, g)
            individual[i] += int(np.count_nonzero(h))
            hit |= h
        return hit

    # the shared counters are not thread safe, so the union runs single-worker
    est = _estimate(union_ind, (True, True, True), method, resolution, samples, seed, 1,
                    {"n": n, "D": D, "threshold": t, "metric": metric, "words": nwords})
    total = est.resolution if est.method == "grid" else est.samples
    union_count = est.extra["count"]
    sum_count = sum(individual)
    if union_count > sum_count:
        raise AssertionError("subadditivity violated")
    extra = dict(est.extra)
    extra.update({"sum_individual": sum_count / total, "max_individual": max(individual) / total})
    return MeasureEstimate(value=est.value, method=est.method, dimension=3, resolution=est.resolution,
                           samples=est.samples, seed=est.seed, half_width=est.half_width, extra=extra)


def taylor_box_check(word: WordIndex, distance_threshold: float, derivative_threshold: float,
                     C: UnitQuaternion | None = None, slices: int = 20, seed: int = 0,
                     resolution: int = 1 << 14, slack: float = 2.0) -> dict:
    """Covering check behind the derivative reduction, with free thresholds t and eta.

    For each sampled (beta, gamma) the alpha-circle is cut into intervals of
    length (1 - 1/sqrt 2) sqrt(eta) / n^2. Because |W''|^2 <= n^4, the speed
    stays >= sqrt(eta/2) on any interval touching {|W'|^2 > eta} and the
    velocity turns by at most sqrt(2) - 1 radians there, so each such interval
    carries at most 2t / (cos(sqrt 2 - 1) sqrt(eta/2)) of {|W - C| <= t}.
    The part of {|W - C| <= t} outside {|W'|^2 <= eta} is measured with
    root-refined breakpoints and compared with the sum of these allowances.
    The first slice passes through C when C is None (C := W at a random point).
    """
    n = word_length(word)
    if n < 1:
        raise ValueError("empty word")
    t, eta = distance_threshold, derivative_threshold
    box = (1 - 1 / math.sqrt(2)) * math.sqrt(eta) / n**2
    nbox = int(math.ceil(TWO_PI / box))
    box = TWO_PI / nbox
    per_box = 2 * t / (math.cos(math.sqrt(2) - 1) * math.sqrt(eta / 2))
    rng = np.random.Generator(np.random.Philox(seed))
    bg = rng.random((slices, 2)) * TWO_PI
    if C is None:
        a0 = float(rng.random() * TWO_PI)
        c = tuple(float(v) for v in evaluate_components(word, a0, bg[0, 0], bg[0, 1]))
    else:
        c = tuple(C)
    xs = np.linspace(0.0, TWO_PI, max(resolution, nbox * 4) + 1)
    measured = predicted = 0.0
    for beta, gamma in bg:
        def dist(a, beta=beta, gamma=gamma):
            return np.sqrt(lift_sq_distance(evaluate_components(word, a, beta, gamma), c))

        def speed_sq(a, beta=beta, gamma=gamma):
            return alpha_derivative_sq(word, a, beta, gamma)

        length, _ = _piece_length([(dist, t), (speed_sq, eta)],
                                  lambda m: (dist(m) <= t) & (speed_sq(m) > eta), xs)
        measured += length / TWO_PI
        fast = speed_sq(xs) > eta
        box_of = np.minimum((xs / box).astype(np.int64), nbox - 1)
        touched = np.unique(box_of[fast]).size
        predicted += touched * per_box / TWO_PI
    measured /= slices
    predicted = min(predicted / slices, 1.0)
    return {"word": word.to_text(), "t": t, "eta": eta, "boxes": nbox, "measured": measured,
            "predicted": predicted, "ok": measured <= slack * predicted}
