"""Birth-death processes: the two- and one-barrier walks and the Moran process."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..bounds import MoranParameters, moran_p
from ..core import Process
from ..oracle import BirthDeathChain
from ._fast import birth_death_run

TWO_BARRIER = "two_barrier"
ONE_BARRIER = "one_barrier"


def _bd_move(k: int, up: float, down: float, u: float) -> int:
    if u < up:
        return k + 1
    if u < up + down:
        return k - 1
    return k


@dataclass(frozen=True)
class BarrierWalkState:
    position: int
    n: int
    p: float
    variant: str = TWO_BARRIER

    def __post_init__(self):
        if self.variant not in (TWO_BARRIER, ONE_BARRIER):
            raise ValueError(f"unknown barrier variant {self.variant!r}")
        if not 0 <= self.position <= self.n:
            raise ValueError(f"position {self.position} outside [0, {self.n}]")
        if not 0 < self.p <= 0.5:
            raise ValueError("p must lie in (0, 1/2]")

    @property
    def absorbed(self) -> bool:
        if self.variant == TWO_BARRIER:
            return self.position in (0, self.n)
        return self.position == self.n

    def rates(self) -> tuple[float, float]:
        if self.absorbed:
            return 0.0, 0.0
        if self.position == 0:  # one-barrier only
            return 2 * self.p, 0.0
        return self.p, self.p


def step_barrier(state: BarrierWalkState, rng: np.random.Generator) -> BarrierWalkState:
    """One transition of the lazy symmetric walk.

    Interior states move up and down with probability ``p`` each.  The
    one-barrier walk leaves 0 for 1 with probability ``2p`` and otherwise stays,
    which makes it the absolute value of a symmetric walk on ``{-n..n}``.
    """
    if state.absorbed:
        return state
    up, down = state.rates()
    k = _bd_move(state.position, up, down, rng.random())
    return BarrierWalkState(k, state.n, state.p, state.variant)


def barrier_chain(n: int, p: float, variant: str = TWO_BARRIER) -> BirthDeathChain:
    if variant == TWO_BARRIER:
        return BirthDeathChain.two_barrier(n, p)
    return BirthDeathChain.one_barrier(n, p)


def _chain_arrays(chain: BirthDeathChain):
    absorbing = np.zeros(chain.n + 1, dtype=np.bool_)
    absorbing[list(chain.absorbing)] = True
    return np.array(chain.up), np.array(chain.down), absorbing


def _fast_birth_death(chain: BirthDeathChain, start: int):
    up, down, absorbing = _chain_arrays(chain)

    def fast_run(rng, max_steps):
        return birth_death_run(rng, start, up, down, absorbing, max_steps)

    return fast_run


def barrier_process(n: int, x0: int, p: float, variant: str = TWO_BARRIER) -> Process:
    init = BarrierWalkState(x0, n, p, variant)
    return Process(
        name=variant,
        initial=init,
        step=step_barrier,
        potential=lambda s: float(s.position),
        absorbed=lambda s: s.absorbed,
        fast_run=_fast_birth_death(barrier_chain(n, p, variant), x0),
    )


def gamblers_ruin_process(coins: int) -> Process:
    """Fair unit bets starting from ``coins``; stops at 0 or ``2 * coins``."""
    return barrier_process(2 * coins, coins, 0.5, TWO_BARRIER)


@dataclass(frozen=True)
class MoranState:
    """``non_mutants`` individuals of fitness 1 among ``n``; mutants have ``r``."""

    non_mutants: int
    n: int
    r: float

    def __post_init__(self):
        MoranParameters(self.n, self.r, self.non_mutants)

    @property
    def absorbed(self) -> bool:
        return self.non_mutants in (0, self.n)


def moran_rates(n: int, r: float, k: int) -> tuple[float, float]:
    up = moran_p(MoranParameters(n, r, k))
    down = r * up
    if up + down > 1.0 + 1e-12:
        raise ValueError(f"invalid Moran transition probabilities at k={k}")
    return up, down


def step_moran(state: MoranState, rng: np.random.Generator) -> MoranState:
    """Fitness-proportional reproduction replacing a uniform individual."""
    if state.absorbed:
        return state
    up, down = moran_rates(state.n, state.r, state.non_mutants)
    return MoranState(_bd_move(state.non_mutants, up, down, rng.random()), state.n, state.r)


def moran_chain(n: int, r: float) -> BirthDeathChain:
    ups = [0.0] * (n + 1)
    downs = [0.0] * (n + 1)
    for k in range(1, n):
        ups[k], downs[k] = moran_rates(n, r, k)
    return BirthDeathChain(n, tuple(ups), tuple(downs), frozenset({0, n}))


def moran_process(n: int, r: float, start: int | None = None) -> Process:
    """Moran process on the non-mutant count; starts from a single mutant."""
    start = n - 1 if start is None else start
    return Process(
        name="moran",
        initial=MoranState(start, n, r),
        step=step_moran,
        potential=lambda s: float(s.non_mutants),
        absorbed=lambda s: s.absorbed,
        fast_run=_fast_birth_death(moran_chain(n, r), start),
    )
