"""Coupon collector: uniform draws, or independent per-kind arrivals."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Process, uniform_index
from ._fast import as_bool_array, coupon_per_kind_run, coupon_uniform_run


@dataclass(frozen=True)
class CouponCollectorState:
    missing: frozenset[int]
    n: int

    def __post_init__(self):
        if len(self.missing) > self.n:
            raise ValueError("more kinds missing than exist")

    @property
    def absorbed(self) -> bool:
        return not self.missing


def step_coupon(
    state: CouponCollectorState, rng: np.random.Generator, per_kind_p: float | None = None
) -> CouponCollectorState:
    """One round of collecting.

    With ``per_kind_p`` unset a single kind is drawn uniformly.  Otherwise each
    missing kind, in increasing order, arrives independently with probability
    ``per_kind_p``.
    """
    if state.absorbed:
        return state
    if per_kind_p is None:
        kind = uniform_index(rng.random(), state.n)
        if kind not in state.missing:
            return state
        return CouponCollectorState(state.missing - {kind}, state.n)
    got = {k for k in sorted(state.missing) if rng.random() < per_kind_p}
    return CouponCollectorState(state.missing - got, state.n) if got else state


def coupon_process(n: int, per_kind_p: float | None = None) -> Process:
    if n < 1:
        raise ValueError("n must be >= 1")
    if per_kind_p is not None and not 0 < per_kind_p <= 1:
        raise ValueError("per_kind_p must lie in (0, 1]")
    init = CouponCollectorState(frozenset(range(n)), n)
    missing = as_bool_array(n, range(n))
    if per_kind_p is None:
        fast = lambda rng, max_steps: coupon_uniform_run(rng, missing, max_steps)  # noqa: E731
    else:
        fast = lambda rng, max_steps: coupon_per_kind_run(rng, missing, per_kind_p, max_steps)  # noqa: E731
    return Process(
        name="coupon" if per_kind_p is None else "coupon_per_kind",
        initial=init,
        step=lambda s, rng: step_coupon(s, rng, per_kind_p),
        potential=lambda s: float(len(s.missing)),
        absorbed=lambda s: s.absorbed,
        fast_run=fast,
    )
