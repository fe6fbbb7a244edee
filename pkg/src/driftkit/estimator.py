"""Empirical drift and step variance from recorded potentials, and the
hitting-time bounds they imply.

Transitions ``X_t -> X_{t+1}`` are grouped by the pre-state ``X_t``.  Each
bin keeps power sums of the one-step decrease ``D = X_t - X_{t+1}``; these
merge by addition, so estimates do not depend on how trajectories are split
or ordered.  Confidence intervals are normal approximations: for the mean
``se = sqrt(v/n)``, for the variance ``se = sqrt((m4 - v^2)/n)`` with ``m4``
the fourth central moment.

Fits are deliberately conservative: the drift theorems need a bound that
holds in every state, so ``delta_hat`` is the smallest lower confidence limit
over all bins, not an average.
"""
from __future__ import annotations

import csv
import math
import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from . import bounds
from .core import BoundReport, Trajectory

Z95 = 1.959963984540054
MIN_COUNT = 30
REGIME_RATIO = 2.0
POOR_FIT_P = 1e-3


class FitRejected(ValueError):
    """The data do not support the requested drift condition."""


class Regime(str, Enum):
    ADDITIVE = "additive"
    MULTIPLICATIVE = "multiplicative"
    ZERO_DRIFT = "zero_drift"
    NEGATIVE = "negative"
    UNKNOWN = "unknown"


@dataclass
class BinStats:
    """Power sums of the one-step decrease for one pre-state bin."""

    count: int = 0
    s_sum: float = 0.0
    d1: float = 0.0
    d2: float = 0.0
    d3: float = 0.0
    d4: float = 0.0

    def add(self, s: float, d: float) -> None:
        self.count += 1
        self.s_sum += s
        self.d1 += d
        self.d2 += d * d
        self.d3 += d**3
        self.d4 += d**4

    def merge(self, other: "BinStats") -> "BinStats":
        return BinStats(
            self.count + other.count,
            self.s_sum + other.s_sum,
            self.d1 + other.d1,
            self.d2 + other.d2,
            self.d3 + other.d3,
            self.d4 + other.d4,
        )

    @property
    def state(self) -> float:
        return self.s_sum / self.count

    @property
    def mean(self) -> float:
        return self.d1 / self.count

    @property
    def variance(self) -> float:
        """Unbiased sample variance (0 for a single observation)."""
        n = self.count
        if n < 2:
            return 0.0
        m = self.mean
        return max(0.0, (self.d2 - n * m * m) / (n - 1))

    @property
    def fourth_central(self) -> float:
        n = self.count
        m = self.mean
        e2, e3, e4 = self.d2 / n, self.d3 / n, self.d4 / n
        return max(0.0, e4 - 4 * m * e3 + 6 * m * m * e2 - 3 * m**4)

    @property
    def mean_se(self) -> float:
        return math.sqrt(self.variance / self.count)

    @property
    def var_se(self) -> float:
        n = self.count
        v_biased = self.variance * (n - 1) / n if n > 1 else 0.0
        return math.sqrt(max(0.0, self.fourth_central - v_biased**2) / n)

    def mean_ci(self, z: float = Z95) -> tuple[float, float]:
        h = z * self.mean_se
        return self.mean - h, self.mean + h

    def var_ci(self, z: float = Z95) -> tuple[float, float]:
        h = z * self.var_se
        return self.variance - h, self.variance + h


@dataclass
class DriftEstimate:
    bins: dict[float, BinStats]
    binning: str = "exact_integer"
    width: float | None = None

    @property
    def total(self) -> int:
        return sum(b.count for b in self.bins.values())

    def merge(self, other: "DriftEstimate") -> "DriftEstimate":
        if (self.binning, self.width) != (other.binning, other.width):
            raise ValueError("cannot merge estimates with different binning")
        out = {k: BinStats().merge(v) for k, v in self.bins.items()}
        for k, v in other.bins.items():
            out[k] = out[k].merge(v) if k in out else BinStats().merge(v)
        return DriftEstimate(dict(sorted(out.items())), self.binning, self.width)

    def eligible(self, min_count: int = MIN_COUNT, min_state: float | None = None) -> list[BinStats]:
        """Bins with enough samples; warns about (and drops) the rest."""
        out, dropped = [], []
        for key, b in self.bins.items():
            if min_state is not None and b.state < min_state:
                continue
            (out if b.count >= min_count else dropped).append(b)
        if dropped:
            warnings.warn(
                f"{len(dropped)} bin(s) with fewer than {min_count} transitions excluded "
                f"(states {sorted(round(b.state, 6) for b in dropped)[:8]}...)",
                stacklevel=3,
            )
        return out

    def table(self) -> list[dict]:
        rows = []
        for b in self.bins.values():
            lo, hi = b.mean_ci()
            vlo, vhi = b.var_ci()
            rows.append(
                {
                    "state": b.state,
                    "count": b.count,
                    "drift": b.mean,
                    "drift_ci": [lo, hi],
                    "variance": b.variance,
                    "variance_ci": [vlo, vhi],
                }
            )
        return rows


@dataclass(frozen=True)
class RegimeFit:
    regime: Regime
    delta_hat: float
    goodness: float = float("nan")
    poor_fit: bool = False
    delta_var: float | None = None
    excluded: int = 0
    details: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        d = {
            "regime": self.regime.value,
            "delta_hat": self.delta_hat,
            "goodness": self.goodness,
            "poor_fit": self.poor_fit,
            "excluded_bins": self.excluded,
        }
        if self.delta_var is not None:
            d["delta_var"] = self.delta_var
        d.update(self.details)
        return d


def _potentials(traj) -> Sequence[float]:
    return traj.potentials if isinstance(traj, Trajectory) else traj


def freedman_diaconis_width(values: np.ndarray) -> float:
    q75, q25 = np.percentile(values, [75, 25])
    w = 2.0 * (q75 - q25) / len(values) ** (1 / 3)
    if w <= 0:
        span = float(values.max() - values.min())
        w = span / max(1.0, math.sqrt(len(values))) or 1.0
    return float(w)


def estimate_drift(trajectories: Iterable, binning: str | float = "exact_integer") -> DriftEstimate:
    """Per-state mean and variance of the one-step decrease ``X_t - X_{t+1}``.

    ``binning`` is ``"exact_integer"`` (one bin per integer state; requires
    integer-valued potentials), ``"auto"`` (integer bins when possible,
    otherwise Freedman-Diaconis width) or a positive bin width.
    """
    seqs = [np.asarray(_potentials(t), dtype=float) for t in trajectories]
    seqs = [s for s in seqs if len(s) >= 2]
    if not seqs:
        raise ValueError("need at least one trajectory with a transition")
    pre = np.concatenate([s[:-1] for s in seqs])
    integral = bool(np.all(pre == np.round(pre)))
    if binning == "auto":
        binning = "exact_integer" if integral else freedman_diaconis_width(pre)
    if binning == "exact_integer":
        if not integral:
            raise ValueError("exact_integer binning needs integer-valued potentials")
        width = None
    else:
        width = float(binning)
        if not width > 0:
            raise ValueError("bin width must be positive")
    post = np.concatenate([s[1:] for s in seqs])
    d = pre - post
    keys = pre if width is None else np.floor(pre / width) * width
    uniq, inv = np.unique(keys, return_inverse=True)
    m = len(uniq)
    counts = np.bincount(inv, minlength=m)
    sums = [np.bincount(inv, weights=w, minlength=m) for w in (pre, d, d * d, d**3, d**4)]
    bins = {
        float(k): BinStats(int(counts[i]), *(float(col[i]) for col in sums))
        for i, k in enumerate(uniq)
    }
    return DriftEstimate(bins, "exact_integer" if width is None else "width", width)


def _constant_fit(values, ses) -> tuple[float, float, float]:
    """Weighted constant fit; returns (constant, chi2/dof, p-value)."""
    values = np.asarray(values, dtype=float)
    ses = np.asarray(ses, dtype=float)
    floor = max(1e-12, 1e-9 * float(np.max(np.abs(values))) if len(values) else 1e-12)
    ses = np.maximum(ses, floor)
    w = 1.0 / ses**2
    c = float(np.sum(w * values) / np.sum(w))
    dof = len(values) - 1
    if dof < 1:
        return c, 0.0, 1.0
    chi2 = float(np.sum(((values - c) / ses) ** 2))
    return c, chi2 / dof, float(stats.chi2.sf(chi2, dof))


def fit_additive(est: DriftEstimate, min_count: int = MIN_COUNT) -> RegimeFit:
    """``delta_hat`` = smallest lower 95% limit of the per-state drift."""
    eligible = est.eligible(min_count, min_state=None)
    eligible = [b for b in eligible if b.state > 0]
    if not eligible:
        raise FitRejected("no bin has enough transitions")
    delta = min(b.mean_ci()[0] for b in eligible)
    if not delta > 0:
        raise FitRejected(f"drift lower confidence limit {delta:.3g} is not positive")
    c, red, pval = _constant_fit([b.mean for b in eligible], [b.mean_se for b in eligible])
    return RegimeFit(
        Regime.ADDITIVE,
        delta,
        red,
        pval < POOR_FIT_P,
        excluded=len(est.bins) - len(eligible),
        details={"constant": c, "p_value": pval},
    )


def fit_multiplicative(est: DriftEstimate, min_count: int = MIN_COUNT) -> RegimeFit:
    """``delta_hat`` = smallest lower 95% limit of drift/state over states >= 1."""
    eligible = est.eligible(min_count, min_state=1.0)
    if not eligible:
        raise FitRejected("no bin at state >= 1 has enough transitions")
    delta = min(b.mean_ci()[0] / b.state for b in eligible)
    if not delta > 0:
        raise FitRejected(f"relative drift lower confidence limit {delta:.3g} is not positive")
    c, red, pval = _constant_fit(
        [b.mean / b.state for b in eligible], [b.mean_se / b.state for b in eligible]
    )
    return RegimeFit(
        Regime.MULTIPLICATIVE,
        delta,
        red,
        pval < POOR_FIT_P,
        excluded=len(est.bins) - len(eligible),
        details={"constant": c, "p_value": pval},
    )


def estimate_variance_bound(est: DriftEstimate, min_count: int = MIN_COUNT) -> tuple[float, float]:
    """(smallest lower, largest upper) 95% limit of the per-state step variance."""
    eligible = est.eligible(min_count)
    if not eligible:
        raise FitRejected("no bin has enough transitions")
    lo = max(0.0, min(b.var_ci()[0] for b in eligible))
    hi = max(b.var_ci()[1] for b in eligible)
    return lo, hi


def classify_regime(est: DriftEstimate, min_count: int = MIN_COUNT) -> RegimeFit:
    """Decide which drift condition the data support.

    1. Zero drift is kept unless it is rejected at level ``POOR_FIT_P``:
       either jointly (chi-square of every eligible bin's drift against 0) or
       for some single bin after a Bonferroni adjustment.  Kept means
       ``zero_drift``.
    2. Otherwise bins whose adjusted interval lies entirely above (below) 0
       are counted.  Only-below gives ``negative``, a mix gives ``unknown``.
    3. With positive drift a weighted constant is fitted to the drift and to
       drift/state and the reduced chi-square values are compared; the smaller
       one wins when it is at least 2 times smaller, giving ``additive`` or
       ``multiplicative``.  Otherwise ``unknown``.
    """
    eligible = [b for b in est.eligible(min_count) if b.state > 0]
    if not eligible:
        return RegimeFit(Regime.UNKNOWN, float("nan"), excluded=len(est.bins))
    excluded = len(est.bins) - len(eligible)
    z = float(stats.norm.ppf(1 - POOR_FIT_P / (2 * len(eligible))))
    cis = [b.mean_ci(z) for b in eligible]
    above = sum(lo > 0 for lo, _ in cis)
    below = sum(hi < 0 for _, hi in cis)
    floor = 1e-12
    chi2 = sum((b.mean / max(b.mean_se, floor)) ** 2 for b in eligible if b.mean_se > 0 or b.mean != 0)
    joint_p = float(stats.chi2.sf(chi2, len(eligible)))
    if not above and not below and joint_p >= POOR_FIT_P:
        var_lo, _ = estimate_variance_bound(est, min_count)
        return RegimeFit(
            Regime.ZERO_DRIFT, 0.0, delta_var=var_lo, excluded=excluded, details={"zero_drift_p": joint_p}
        )
    if below and not above:
        return RegimeFit(Regime.NEGATIVE, min(b.mean for b in eligible), excluded=excluded)
    if below or not above:
        return RegimeFit(Regime.UNKNOWN, float("nan"), excluded=excluded, details={"zero_drift_p": joint_p})
    _, r_add, _ = _constant_fit([b.mean for b in eligible], [b.mean_se for b in eligible])
    mult = [b for b in eligible if b.state >= 1]
    if mult:
        _, r_mul, _ = _constant_fit([b.mean / b.state for b in mult], [b.mean_se / b.state for b in mult])
    else:
        r_mul = math.inf
    details = {"residual_additive": r_add, "residual_multiplicative": r_mul}
    if r_mul * REGIME_RATIO <= r_add:
        try:
            fit = fit_multiplicative(est, min_count)
        except FitRejected:
            return RegimeFit(Regime.UNKNOWN, float("nan"), excluded=excluded, details=details)
        return RegimeFit(fit.regime, fit.delta_hat, fit.goodness, fit.poor_fit, excluded=fit.excluded, details=details)
    if r_add * REGIME_RATIO <= r_mul:
        try:
            fit = fit_additive(est, min_count)
        except FitRejected:
            return RegimeFit(Regime.UNKNOWN, float("nan"), excluded=excluded, details=details)
        return RegimeFit(fit.regime, fit.delta_hat, fit.goodness, fit.poor_fit, excluded=fit.excluded, details=details)
    return RegimeFit(Regime.UNKNOWN, float("nan"), excluded=excluded, details=details)


def predict_hitting_time(
    fit: RegimeFit, x0: float, interval: bounds.IntervalParameters | None = None
) -> BoundReport:
    """Evaluate the drift bound matching ``fit`` from start ``x0``.

    ``zero_drift`` needs ``interval`` (its ``delta_var`` is the variance
    lower bound, e.g. from :func:`estimate_variance_bound`).
    """
    regime = Regime(fit.regime)
    if regime is Regime.ADDITIVE:
        return bounds.additive_upper_report(x0, fit.delta_hat)
    if regime is Regime.MULTIPLICATIVE:
        return bounds.multiplicative_report(x0, fit.delta_hat)
    if regime is Regime.ZERO_DRIFT:
        if interval is None:
            raise ValueError("zero-drift prediction needs interval parameters")
        return bounds.martingale_report(interval.a, interval.b, x0, interval.delta_var, "upper")
    raise ValueError(
        f"no upper bound for regime {regime.value!r}: negative-drift and unclassified "
        "processes are outside what this toolkit bounds"
    )


def read_trajectory_csv(path) -> list[list[float]]:
    """Potential sequences from a ``replicate_index,t,potential`` CSV."""
    groups: dict[int, list[tuple[int, float]]] = defaultdict(list)
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"replicate_index", "t", "potential"} - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"trajectory CSV lacks columns {sorted(missing)}")
        for row in reader:
            groups[int(row["replicate_index"])].append((int(row["t"]), float(row["potential"])))
    return [[p for _, p in sorted(rows)] for _, rows in sorted(groups.items())]
