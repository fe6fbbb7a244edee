"""Figures written next to the delimited outputs (Agg backend, no display)."""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .core import BoundReport, Direction, HittingTimeSample  # noqa: E402

_STYLE = {Direction.UPPER: "--", Direction.LOWER: ":", Direction.EXACT: "-"}


def _save(fig, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # no timestamps or version strings, so reruns give identical files
    meta = {"Software": None} if path.suffix.lower() == ".png" else {}
    fig.savefig(path, dpi=100, metadata=meta)
    plt.close(fig)


def hitting_time_figure(
    samples: Sequence[HittingTimeSample],
    bound_reports: Sequence[BoundReport],
    path,
    summary=None,
) -> None:
    """Histogram of uncensored hitting times with the mean, its CI and bounds."""
    x = np.array([s.steps for s in samples if not s.censored], dtype=float)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    if len(x):
        ax.hist(x, bins="auto", color="0.7", edgecolor="0.4")
        ax.axvline(x.mean(), color="k", lw=1.5, label=f"mean {x.mean():.4g}")
    if summary is not None and summary.ci95 is not None:
        ax.axvspan(*summary.ci95, color="tab:blue", alpha=0.2, label="95% CI")
    for i, b in enumerate(bound_reports):
        ax.axvline(
            b.bound,
            color=f"C{(i + 1) % 10}",
            ls=_STYLE[b.direction],
            label=f"{b.theorem_id.value} {b.bound:.4g}",
        )
    ax.set_xlabel("hitting time")
    ax.set_ylabel("replicates")
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def drift_figure(estimate, path) -> None:
    """Per-state drift with 95% intervals."""
    rows = estimate.table()
    s = np.array([r["state"] for r in rows])
    d = np.array([r["drift"] for r in rows])
    lo = np.array([r["drift_ci"][0] for r in rows])
    hi = np.array([r["drift_ci"][1] for r in rows])
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.errorbar(s, d, yerr=[d - lo, hi - d], fmt="o", ms=3, capsize=2)
    ax.axhline(0.0, color="0.5", lw=0.8)
    ax.set_xlabel("state")
    ax.set_ylabel("mean one-step decrease")
    fig.tight_layout()
    _save(fig, path)
