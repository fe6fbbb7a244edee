"""Evaluators for the additive, multiplicative and variable drift bounds, the
variance-based martingale bound, the barrier walks and the Moran process.

All functions are pure.  Each ``*_report`` helper wraps the numeric value in a
:class:`~driftkit.core.BoundReport` carrying the inputs used.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import BoundReport, Direction, TheoremId

QUAD_TOL = 1e-9
QUAD_MAX_DEPTH = 50
MONOTONE_GRID = 1024
NEAR_NEUTRAL = 1e-6


@dataclass(frozen=True)
class DriftParameters:
    x0_mean: float
    delta: float
    step_bound: float | None = None

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if not self.x0_mean >= 0:
            raise ValueError(f"x0_mean must be nonnegative, got {self.x0_mean}")
        if self.step_bound is not None and self.step_bound < 0:
            raise ValueError("step_bound must be nonnegative")


@dataclass(frozen=True)
class IntervalParameters:
    a: float
    b: float
    x0_mean: float
    delta_var: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"need a < b, got a={self.a}, b={self.b}")
        if not self.a <= self.x0_mean <= self.b:
            raise ValueError(f"x0_mean={self.x0_mean} outside [{self.a}, {self.b}]")
        if not self.delta_var > 0:
            raise ValueError("delta_var must be positive")


@dataclass(frozen=True)
class MoranParameters:
    n: int
    r: float
    k: int = 1

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("population size n must be at least 2")
        if not self.r > 0:
            raise ValueError("fitness r must be positive")
        if not 0 <= self.k <= self.n:
            raise ValueError(f"k={self.k} outside [0, {self.n}]")


def additive_upper(p: DriftParameters) -> float:
    return p.x0_mean / p.delta


def additive_lower(p: DriftParameters) -> float:
    if p.step_bound is None:
        raise ValueError("the additive lower bound needs a finite step_bound")
    return p.x0_mean / p.delta


def multiplicative_upper(p: DriftParameters) -> float:
    if p.x0_mean < 1:
        raise ValueError("multiplicative drift needs x0_mean >= 1")
    return (1.0 + math.log(p.x0_mean)) / p.delta


def multiplicative_tail(s: float, delta: float, k: float) -> tuple[float, float]:
    """Threshold ``(k + ln s)/delta`` exceeded with probability at most ``e^-k``."""
    if s < 1:
        raise ValueError("start value s must be >= 1")
    if not delta > 0:
        raise ValueError("delta must be positive")
    if not k > 0:
        raise ValueError("k must be positive")
    return (k + math.log(s)) / delta, math.exp(-k)


def _adaptive_simpson(f, a, b, tol, max_depth):
    # returns (integral, error estimate)
    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        diff = left + right - whole
        if depth >= max_depth or abs(diff) <= 15.0 * tol:
            return left + right + diff / 15.0, abs(diff) / 15.0
        li, le = recurse(a, m, fa, flm, fm, left, tol / 2.0, depth + 1)
        ri, re = recurse(m, b, fm, frm, fb, right, tol / 2.0, depth + 1)
        return li + ri, le + re

    if a == b:
        return 0.0, 0.0
    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 0)


def variable_drift_upper(
    h: Callable[[float], float], x0_mean: float, tol: float = QUAD_TOL
) -> tuple[float, float]:
    """``1/h(1) + integral_1^x0 dx/h(x)`` and the quadrature error estimate.

    ``h`` must be monotonically increasing with ``h(1) > 0``; monotonicity is
    checked on 1024 geometric points of ``[1, x0_mean]`` and a violation is
    an error.
    """
    if x0_mean < 1:
        raise ValueError("variable drift needs x0_mean >= 1")
    h1 = h(1.0)
    if not h1 > 0:
        raise ValueError(f"h(1) must be positive, got {h1}")
    if x0_mean > 1:
        grid = np.geomspace(1.0, x0_mean, MONOTONE_GRID)
        values = np.array([h(float(x)) for x in grid])
        if np.any(np.diff(values) < 0):
            bad = int(np.argmax(np.diff(values) < 0))
            raise ValueError(f"h is not monotone increasing near x={grid[bad]:.6g}")
    # the integrand is decreasing, so splitting at a few geometric nodes keeps
    # the recursion shallow for wide ranges
    edges = np.geomspace(1.0, x0_mean, 9) if x0_mean > 1 else [1.0, 1.0]
    edges[-1] = x0_mean
    total, err = 1.0 / h1, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        part, e = _adaptive_simpson(
            lambda x: 1.0 / h(x), float(lo), float(hi), tol / (len(edges) - 1), QUAD_MAX_DEPTH
        )
        total += part
        err += e
    return total, err


def martingale_interval_bound(p: IntervalParameters, direction: str | Direction = "upper") -> float:
    """``(x0 - a)(b - x0)/delta``.

    As an upper bound (variance >= delta) it presumes the process never
    leaves ``[a, b]``; as a lower bound (variance <= delta) it does not.
    """
    d = Direction(direction)
    if d is Direction.EXACT:
        raise ValueError("direction must be upper or lower")
    return (p.x0_mean - p.a) * (p.b - p.x0_mean) / p.delta_var


def _check_p(p: float) -> None:
    if not 0 < p <= 0.5:
        raise ValueError(f"p must lie in (0, 1/2], got {p}")


def two_barrier_expected_time(n: int, x0: int, p: float) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 <= x0 <= n:
        raise ValueError(f"x0={x0} outside [0, {n}]")
    _check_p(p)
    return x0 * (n - x0) / (2.0 * p)


def one_barrier_expected_time(n: int, p: float) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_p(p)
    return n * n / (2.0 * p)


def moran_p(m: MoranParameters) -> float:
    """Probability that the number of non-mutants grows from ``m.k``."""
    n, r, k = m.n, m.r, m.k
    if k in (0, n):
        raise ValueError("p(k) is defined for 0 < k < n only")
    return k / (k + r * (n - k)) * ((n - k) / n)


def _backward_g(right: Callable[[int], float], n: int, ratio: float) -> list[float]:
    """g(n-1) = 1/right(n-1); g(k) = (ratio-1)/(ratio*right(k)) + g(k+1)/ratio.

    ``ratio`` is the factor by which moving toward 0 is likelier than moving
    away from it; ``right(k)`` is the probability of moving away.
    """
    g = [0.0] * (n + 1)
    g[n - 1] = 1.0 / right(n - 1)
    for k in range(n - 2, 0, -1):
        g[k] = (ratio - 1.0) / (ratio * right(k)) + g[k + 1] / ratio
    g[n] = g[n - 1]
    return g


def moran_potential_bound(n: int, r: float) -> float:
    """Upper bound on the Moran absorption time from a single mutant, r != 1.

    For r > 1 the non-mutant count drifts to 0 and the potential
    ``phi(y) = sum_{i<=y} g(i)`` has drift exactly ``r - 1``; the bound is
    ``phi(n-1)/(r-1)``.  For r < 1 the same construction runs on the mutant
    count (which drifts to 0 with ratio ``1/r``) started at 1, giving
    ``g(1)/(1/r - 1)``.
    """
    if n < 2:
        raise ValueError("population size n must be at least 2")
    if not r > 0:
        raise ValueError("fitness r must be positive")
    if abs(r - 1.0) < NEAR_NEUTRAL:
        raise ValueError("r is (numerically) 1; use moran_neutral_bound")
    if r > 1:
        g = _backward_g(lambda k: moran_p(MoranParameters(n, r, k)), n, r)
        return math.fsum(g[1:n]) / (r - 1.0)
    # mutant count m = n - k moves up w.p. r*p(n-m) and down w.p. p(n-m)
    g = _backward_g(lambda m: r * moran_p(MoranParameters(n, r, n - m)), n, 1.0 / r)
    return g[1] / (1.0 / r - 1.0)


def moran_neutral_bound(n: int, start: int | None = None) -> float:
    """Variance-based bound for the neutral (r = 1) Moran process.

    The one-step variance at any transient state is at least
    ``2(n-1)/n^2``, so from ``start`` non-mutants the expected absorption time
    is at most ``start(n - start) n^2 / (2(n-1))``; ``n^2/2`` from ``n - 1``.
    """
    if n < 2:
        raise ValueError("population size n must be at least 2")
    start = n - 1 if start is None else start
    if not 0 <= start <= n:
        raise ValueError(f"start={start} outside [0, {n}]")
    return start * (n - start) * n * n / (2.0 * (n - 1))


# ---------------------------------------------------------------- reports


def additive_upper_report(x0_mean: float, delta: float) -> BoundReport:
    p = DriftParameters(x0_mean, delta)
    return BoundReport(TheoremId.ADDITIVE_UPPER, {"x0_mean": x0_mean, "delta": delta}, additive_upper(p))


def additive_lower_report(x0_mean: float, delta: float, step_bound: float) -> BoundReport:
    p = DriftParameters(x0_mean, delta, step_bound)
    return BoundReport(
        TheoremId.ADDITIVE_LOWER,
        {"x0_mean": x0_mean, "delta": delta, "step_bound": step_bound},
        additive_lower(p),
    )


def multiplicative_report(x0_mean: float, delta: float) -> BoundReport:
    p = DriftParameters(x0_mean, delta)
    return BoundReport(TheoremId.MULTIPLICATIVE, {"x0_mean": x0_mean, "delta": delta}, multiplicative_upper(p))


def multiplicative_tail_report(s: float, delta: float, k: float) -> BoundReport:
    threshold, prob = multiplicative_tail(s, delta, k)
    return BoundReport(
        TheoremId.MULTIPLICATIVE_TAIL,
        {"s": s, "delta": delta, "k": k, "prob_bound": prob},
        threshold,
    )


def martingale_report(a: float, b: float, x0_mean: float, delta_var: float, direction="upper") -> BoundReport:
    d = Direction(direction)
    tid = TheoremId.MARTINGALE_UPPER if d is Direction.UPPER else TheoremId.MARTINGALE_LOWER
    value = martingale_interval_bound(IntervalParameters(a, b, x0_mean, delta_var), d)
    return BoundReport(tid, {"a": a, "b": b, "x0_mean": x0_mean, "delta_var": delta_var}, value)


def two_barrier_report(n: int, x0: int, p: float) -> BoundReport:
    return BoundReport(TheoremId.TWO_BARRIER, {"n": n, "x0": x0, "p": p}, two_barrier_expected_time(n, x0, p))


def one_barrier_report(n: int, p: float) -> BoundReport:
    return BoundReport(TheoremId.ONE_BARRIER, {"n": n, "p": p}, one_barrier_expected_time(n, p))


def moran_potential_report(n: int, r: float) -> BoundReport:
    return BoundReport(TheoremId.MORAN_POTENTIAL, {"n": n, "r": r}, moran_potential_bound(n, r))


def moran_neutral_report(n: int, start: int | None = None) -> BoundReport:
    start = n - 1 if start is None else start
    return BoundReport(TheoremId.MORAN_NEUTRAL, {"n": n, "start": start}, moran_neutral_bound(n, start))


def variable_report(h: Callable[[float], float], x0_mean: float, tol: float = QUAD_TOL, label: str = "") -> BoundReport:
    value, err = variable_drift_upper(h, x0_mean, tol)
    inputs: dict = {"x0_mean": x0_mean, "tol": tol}
    if label:
        inputs["h"] = label
    return BoundReport(TheoremId.VARIABLE, inputs, value, error=err)
