"""Exhaustive shortest-word search, Diophantine fits and degenerate-tower slopes.

The search walks the prefix tree of reduced words level by level with numpy,
left-folding one letter quaternion at a time with :func:`qmul`. The scalar
oracle :func:`naive_min_distance` performs the same left fold on Python
floats, so both produce bit-identical distances and the same argmin.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from .rotation import TWO_PI, RotationTriple, UnitQuaternion, fold_sq_distance, lift_sq_distance, qmul
from .words import (
    TowerCollapseError,
    WordIndex,
    commutator_tower,
    enumerate_letter_sequences,
)

MAX_SEARCH_LENGTH = 16
CHUNK_DEPTH_LEAVES = 13  # at most 3^13 leaves per chunk
RADIUS_TABLE_DEPTH = 6
PRUNE_MARGIN = 1e-12
DEGENERATE_DISTANCE = 1e-12
UNDERFLOW_DISTANCE = 1e-300
_INVERSE = (1, 0, 3, 2)
_ALLOWED = np.array([[c for c in range(4) if c != _INVERSE[p]] for p in range(4)], dtype=np.int8)


class SearchCapError(ValueError):
    """Requested length exceeds the exhaustive-search cap."""


def letter_quaternions(point: RotationTriple) -> tuple[tuple[float, float, float, float], ...]:
    """(A, A^-1, B, B^-1) at the point, in letter-code order."""
    ca, sa = math.cos(point.alpha), math.sin(point.alpha)
    cb, sb = math.cos(point.beta), math.sin(point.beta)
    bx, by = sb * math.cos(point.gamma), sb * math.sin(point.gamma)
    return ((ca, sa, 0.0, 0.0), (ca, -sa, 0.0, 0.0), (cb, bx, by, 0.0), (cb, -bx, -by, 0.0))


def _sq_distance(metric: str):
    if metric == "so3":
        return fold_sq_distance
    if metric == "lift":
        return lift_sq_distance
    raise ValueError(f"unknown metric {metric!r}")


def fold_letters(codes: Sequence[int], letters) -> tuple[float, float, float, float]:
    """Left fold of the letter quaternions starting from the identity."""
    q = (1.0, 0.0, 0.0, 0.0)
    for c in codes:
        q = qmul(q, letters[c])
    return q


@dataclass(frozen=True)
class SearchResult:
    word: WordIndex
    distance: float
    n: int
    evaluated: int = 0
    pruned: int = 0
    degenerate: bool = False
    underflow: bool = False

    def __iter__(self):
        return iter((self.word, self.distance))


def _flags(d: float) -> tuple[float, bool, bool]:
    underflow = d < UNDERFLOW_DISTANCE
    return (0.0 if underflow else d), d < DEGENERATE_DISTANCE, underflow


def naive_min_distance(n: int, point: RotationTriple, C: UnitQuaternion, metric: str = "so3") -> SearchResult:
    """Brute force over every reduced word, one scalar left fold per word."""
    letters = letter_quaternions(point)
    dist = _sq_distance(metric)
    c = C.as_tuple()
    best, best_codes, count = math.inf, None, 0
    for codes in enumerate_letter_sequences(n):
        d2 = float(dist(fold_letters(codes, letters), c))
        count += 1
        if d2 < best:
            best, best_codes = d2, codes
    d, deg, uf = _flags(math.sqrt(best))
    return SearchResult(WordIndex.from_letters(best_codes), d, n, evaluated=count, degenerate=deg, underflow=uf)


def suffix_radii(point: RotationTriple, n: int, metric: str = "so3") -> list[float]:
    """Upper bounds r[l] >= |S - 1| over all reduced words S of length l.

    Exact maxima (plus a rounding margin) for l <= RADIUS_TABLE_DEPTH,
    extended by subadditivity of the distance to the identity.
    """
    letters = letter_quaternions(point)
    dist = _sq_distance(metric)
    one = (1.0, 0.0, 0.0, 0.0)
    cap = math.sqrt(2.0) if metric == "so3" else 2.0
    radii = [0.0]
    for ell in range(1, min(n, RADIUS_TABLE_DEPTH) + 1):
        worst = max(float(dist(fold_letters(codes, letters), one)) for codes in enumerate_letter_sequences(ell))
        radii.append(min(cap, math.sqrt(worst) + 1e-13 * ell))
    for ell in range(len(radii), n + 1):
        radii.append(min(cap, min(radii[i] + radii[ell - i] for i in range(1, ell))))
    return radii


class _Best:
    """Shared upper bound used only for pruning; the answer itself is merged deterministically."""

    def __init__(self, value: float):
        self.value = value
        self._lock = threading.Lock()

    def offer(self, v: float):
        with self._lock:
            if v < self.value:
                self.value = v


def _expand(Q, codes, letter_arrays):
    """Children of every prefix, in lexicographic order of the letter sequence."""
    child_codes = _ALLOWED[codes[:, -1]].reshape(-1)
    parent = np.repeat(np.arange(len(codes)), 3)
    P = tuple(comp[parent] for comp in Q)
    L = tuple(comp[child_codes] for comp in letter_arrays)
    newQ = qmul(P, L)
    newcodes = np.concatenate([codes[parent], child_codes[:, None]], axis=1)
    return newQ, newcodes


def _search_chunk(prefix: tuple[int, ...], n: int, letters, c, dist, radii, best: _Best, prune: bool):
    letter_arrays = tuple(np.array([l[i] for l in letters]) for i in range(4))
    q = fold_letters(prefix, letters)
    Q = tuple(np.array([v]) for v in q)
    codes = np.array([prefix], dtype=np.int8)
    pruned = 0
    for depth in range(len(prefix), n):
        if prune and depth > len(prefix):
            d = np.sqrt(dist(Q, c))
            keep = d - radii[n - depth] <= best.value + PRUNE_MARGIN
            if not keep.all():
                pruned += int(np.count_nonzero(~keep)) * 3 ** (n - depth)
                Q = tuple(comp[keep] for comp in Q)
                codes = codes[keep]
                if len(codes) == 0:
                    return math.inf, None, 0, pruned
        Q, codes = _expand(Q, codes, letter_arrays)
    d2 = dist(Q, c)
    i = int(np.argmin(d2))
    best.offer(math.sqrt(float(d2[i])))
    return float(d2[i]), tuple(int(x) for x in codes[i]), len(codes), pruned


def _greedy_bound(n: int, letters, c, dist) -> float:
    q, codes = (1.0, 0.0, 0.0, 0.0), []
    for _ in range(n):
        options = [x for x in range(4) if not codes or x != _INVERSE[codes[-1]]]
        x = min(options, key=lambda x: float(dist(qmul(q, letters[x]), c)))
        codes.append(x)
        q = qmul(q, letters[x])
    return math.sqrt(float(dist(q, c)))


def min_distance(n: int, point: RotationTriple, C: UnitQuaternion, threads: int = 1,
                 prune: bool = True, metric: str = "so3") -> SearchResult:
    """Exhaustive minimum of the distance to C over all reduced words of length n.

    Ties go to the first word in enumeration order. Prefixes whose distance
    minus the largest possible suffix displacement exceeds the best bound are
    skipped; the margin keeps pruning from ever removing a tying word, so the
    result does not depend on ``threads`` or on the pruning order.
    """
    if not 1 <= n <= MAX_SEARCH_LENGTH:
        raise SearchCapError(f"n = {n} outside the search range 1..{MAX_SEARCH_LENGTH}")
    letters = letter_quaternions(point)
    dist = _sq_distance(metric)
    c = C.as_tuple()
    radii = suffix_radii(point, n, metric) if prune else None
    best = _Best(_greedy_bound(n, letters, c, dist) if prune else math.inf)
    # the chunking is fixed by n alone, never by the thread count
    split = min(n, max(2, n - CHUNK_DEPTH_LEAVES))
    prefixes = list(enumerate_letter_sequences(split))

    def run(prefix):
        return _search_chunk(prefix, n, letters, c, dist, radii, best, prune)

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            results = list(ex.map(run, prefixes))
    else:
        results = [run(p) for p in prefixes]
    best_d2, best_codes, evaluated, pruned = math.inf, None, 0, 0
    for d2, codes, ev, pr in results:  # chunks are in enumeration order
        evaluated += ev
        pruned += pr
        if codes is not None and d2 < best_d2:
            best_d2, best_codes = d2, codes
    d, deg, uf = _flags(math.sqrt(best_d2))
    return SearchResult(WordIndex.from_letters(best_codes), d, n, evaluated=evaluated,
                        pruned=pruned, degenerate=deg, underflow=uf)


def random_points(count: int, seed: int) -> list[RotationTriple]:
    """Uniform points on T^3 from a Philox stream."""
    rng = np.random.Generator(np.random.Philox(seed))
    vals = rng.random((count, 3)) * TWO_PI
    return [RotationTriple(*map(float, row)) for row in vals]


@dataclass
class ExperimentRecord:
    kind: str
    parameters: dict
    results: list = field(default_factory=list)
    fits: list = field(default_factory=list)

    CSV_FIELDS = ("point", "alpha", "beta", "gamma", "n", "min_dist", "word", "seconds")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_FIELDS)
        for row in self.results:
            w.writerow([row["point"], repr(row["alpha"]), repr(row["beta"]), repr(row["gamma"]), row["n"],
                        repr(row["min_dist"]), row["word"],
                        "" if row.get("seconds") is None else f"{row['seconds']:.6f}"])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _linear_fit(xs, ys) -> dict:
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    if len(xs) < 2:
        return {"slope": None, "intercept": None, "residual": None}
    A = np.vstack([xs, np.ones_like(xs)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, ys, rcond=None)
    resid = float(np.sqrt(np.mean((A @ np.array([slope, intercept]) - ys) ** 2)))
    return {"slope": float(slope), "intercept": float(intercept), "residual": resid}


def fit_exponents(ns: Sequence[int], ds: Sequence[float]) -> dict:
    """Fits of -log d(n) against n and against n^2, degenerate distances excluded.

    For each model f(n) in {n, n^2}: a least-squares line with intercept
    (``D_lsq = exp(slope)``), a line through the origin (``D_origin``) and the
    envelope ``D_env = max_n d(n)^(-1/f(n))``, the smallest D with
    d(n) >= D^(-f(n)) at every used n.
    """
    used = [(n, d) for n, d in zip(ns, ds) if d >= DEGENERATE_DISTANCE]
    out = {"used": [n for n, _ in used], "excluded": [n for n, d in zip(ns, ds) if d < DEGENERATE_DISTANCE]}
    for name, f in (("linear", lambda n: n), ("quadratic", lambda n: n * n)):
        fx = [f(n) for n, _ in used]
        ys = [-math.log(max(d, 1e-300)) for _, d in used]
        lin = _linear_fit(fx, ys)
        origin = sum(x * y for x, y in zip(fx, ys)) / sum(x * x for x in fx) if fx else None
        env = max((y / x for x, y in zip(fx, ys)), default=None)
        out[name] = {
            "D_lsq": math.exp(lin["slope"]) if lin["slope"] is not None else None,
            "intercept": lin["intercept"],
            "residual": lin["residual"],
            "D_origin": math.exp(origin) if origin is not None else None,
            "D_env": math.exp(env) if env is not None else None,
        }
    return out


def fit_diophantine(points: Sequence[RotationTriple], n_max: int, C: UnitQuaternion, threads: int = 1,
                    timing: bool = False, metric: str = "so3", seed: int | None = None) -> ExperimentRecord:
    """Min distance for n = 1..n_max at every point, with per-point exponent fits.

    ``min_dist`` in the results is the minimum at length exactly n;
    ``running_min`` is the minimum over lengths <= n and is nonincreasing.
    The ``seconds`` column is only filled when ``timing`` is set, so the
    default output is byte-reproducible.
    """
    if n_max > MAX_SEARCH_LENGTH:
        raise SearchCapError(f"n_max = {n_max} exceeds {MAX_SEARCH_LENGTH}")
    rec = ExperimentRecord("fit_diophantine", {
        "n_max": n_max, "target": list(C.as_tuple()), "metric": metric, "seed": seed,
        "points": [list(p.as_tuple()) for p in points],
    })
    for idx, p in enumerate(points):
        ds, running = [], math.inf
        for n in range(1, n_max + 1):
            t0 = time.perf_counter()
            res = min_distance(n, p, C, threads=threads, metric=metric)
            elapsed = time.perf_counter() - t0
            running = min(running, res.distance)
            ds.append(res.distance)
            rec.results.append({
                "point": idx, "alpha": p.alpha, "beta": p.beta, "gamma": p.gamma, "n": n,
                "min_dist": res.distance, "word": res.word.to_text(), "running_min": running,
                "degenerate": res.degenerate, "underflow": res.underflow,
                "seconds": elapsed if timing else None,
            })
        fit = fit_exponents(list(range(1, n_max + 1)), ds)
        fit["point"] = idx
        rec.fits.append(fit)
    return rec


# ---- degenerate commutator towers ------------------------------------------------

DEFAULT_TOWER_ALPHAS = tuple(float(a) for a in np.geomspace(1e-4, 1e-2, 13))


def _mp_letters(alpha, beta, gamma):
    ca, sa = mpmath.cos(alpha), mpmath.sin(alpha)
    cb, sb = mpmath.cos(beta), mpmath.sin(beta)
    bx, by = sb * mpmath.cos(gamma), sb * mpmath.sin(gamma)
    zero = mpmath.mpf(0)
    return ((ca, sa, zero, zero), (ca, -sa, zero, zero), (cb, bx, by, zero), (cb, -bx, -by, zero))


@dataclass(frozen=True)
class DegenerateFit:
    k: int
    word: str
    signs: tuple | None
    quantity: str
    slope: float
    expected: int
    slope_squared: float
    slope_distance: float
    alphas: tuple
    log10_values: tuple

    def relative_error(self) -> float:
        return abs(self.slope - self.expected) / self.expected

    def to_dict(self) -> dict:
        return asdict(self)


def degenerate_order(k: int, beta: float = 1.0, gamma: float = 1.2, alphas: Sequence[float] | None = None,
                     signs: Sequence[int] | None = None, quantity: str = "squared",
                     dps: int | None = None) -> DegenerateFit:
    """Log-log slope of the tower word's distance to the identity as alpha -> 0.

    Words are evaluated in mpmath so the tiny distances at small alpha are
    resolved. ``quantity`` picks what ``slope`` reports: ``"squared"`` fits
    the squared folded distance, ``"distance"`` the distance itself (its
    slope is exactly half). Both slopes are always recorded.
    """
    if not 0 <= k <= 3:
        raise ValueError("tower level must be in 0..3")
    if quantity not in ("squared", "distance"):
        raise ValueError("quantity must be 'squared' or 'distance'")
    alphas = tuple(float(a) for a in (alphas or DEFAULT_TOWER_ALPHAS))
    if min(alphas) < 1e-4 - 1e-18 or max(alphas) > 1e-2 + 1e-18:
        raise ValueError("alphas must lie in [1e-4, 1e-2]")
    word = commutator_tower(k, signs)
    codes = word.letters()
    one = (1, 0, 0, 0)
    logs = []
    with mpmath.workdps(dps or 30 + 12 * 2**k):
        for a in alphas:
            letters = _mp_letters(mpmath.mpf(a), mpmath.mpf(beta), mpmath.mpf(gamma))
            q = (mpmath.mpf(1), mpmath.mpf(0), mpmath.mpf(0), mpmath.mpf(0))
            for c in codes:
                q = qmul(q, letters[c])
            dm = sum((q[i] - one[i]) ** 2 for i in range(4))
            dp = sum((q[i] + one[i]) ** 2 for i in range(4))
            logs.append(float(mpmath.log10(min(dm, dp))))
    x = np.log10(alphas)
    slope_sq = float(np.polyfit(x, np.array(logs), 1)[0])
    slope = slope_sq if quantity == "squared" else slope_sq / 2
    return DegenerateFit(
        k=k, word=word.to_text(), signs=tuple(signs) if signs is not None else None, quantity=quantity,
        slope=slope, expected=2**k, slope_squared=slope_sq, slope_distance=slope_sq / 2,
        alphas=alphas, log10_values=tuple(logs),
    )


def explore_tower_signs(k: int, beta: float = 1.0, gamma: float = 1.2, alphas: Sequence[float] | None = None) -> list[dict]:
    """Squared-distance slope for every sign vector whose tower does not collapse (exploratory)."""
    out = []
    for signs in itertools.product((1, -1), repeat=2 + 2 * k):
        try:
            fit = degenerate_order(k, beta, gamma, alphas, signs=signs)
        except TowerCollapseError:
            continue
        out.append({"signs": list(signs), "word_length": len(WordIndex.parse(fit.word)),
                    "slope_squared": fit.slope_squared, "slope_distance": fit.slope_distance})
    return out


def tower_growth_record(beta: float = 1.0, gamma: float = 1.2, k_max: int = 3) -> dict:
    """-log10 of the tower distance at the smallest alpha, against sqrt(n) = 2^k."""
    rows = []
    for k in range(0, k_max + 1):
        fit = degenerate_order(k, beta, gamma, quantity="distance")
        rows.append({"k": k, "n": 4**k, "sqrt_n": 2**k, "neg_log10_d_min_alpha": -fit.log10_values[0] / 2,
                     "slope_distance": fit.slope_distance})
    return {"beta": beta, "gamma": gamma, "rows": rows}

