"""Shared vocabulary: processes, trajectories, hitting-time samples, bound
reports and deterministic per-replicate random streams.

Random streams are numpy ``Generator`` objects over the PCG64 bit generator,
seeded through ``SeedSequence(seed)``.  Every kernel in this package draws
only uniform doubles via ``rng.random()``, so the pure-Python step kernels and
the compiled fast paths consume the stream identically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One SplitMix64 output for generator state ``x``.

    The state is advanced by the golden-ratio increment before the finalizer,
    so ``splitmix64(0) == 0xE220A8397B1DCDAF``, the reference generator's first
    output from seed 0.
    """
    z = (x + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_replicate_seed(master_seed: int, replicate_index: int) -> int:
    """Seed of replicate ``replicate_index``: ``splitmix64(master ^ index)``."""
    if replicate_index < 0:
        raise ValueError("replicate_index must be nonnegative")
    return splitmix64((master_seed & MASK64) ^ (replicate_index & MASK64))


def make_stream(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & MASK64))


def uniform_index(u: float, m: int) -> int:
    """Map a uniform double in [0, 1) to an index in range(m)."""
    i = int(u * m)
    return i if i < m else m - 1


class Direction(str, Enum):
    UPPER = "upper"
    LOWER = "lower"
    EXACT = "exact"


class TheoremId(str, Enum):
    ADDITIVE_UPPER = "additive_upper"
    ADDITIVE_LOWER = "additive_lower"
    MULTIPLICATIVE = "multiplicative"
    MULTIPLICATIVE_TAIL = "multiplicative_tail"
    VARIABLE = "variable"
    MARTINGALE_UPPER = "martingale_upper"
    MARTINGALE_LOWER = "martingale_lower"
    TWO_BARRIER = "two_barrier"
    ONE_BARRIER = "one_barrier"
    MORAN_POTENTIAL = "moran_potential"
    MORAN_NEUTRAL = "moran_neutral"


THEOREM_DIRECTION = {
    TheoremId.ADDITIVE_UPPER: Direction.UPPER,
    TheoremId.ADDITIVE_LOWER: Direction.LOWER,
    TheoremId.MULTIPLICATIVE: Direction.UPPER,
    TheoremId.MULTIPLICATIVE_TAIL: Direction.UPPER,
    TheoremId.VARIABLE: Direction.UPPER,
    TheoremId.MARTINGALE_UPPER: Direction.UPPER,
    TheoremId.MARTINGALE_LOWER: Direction.LOWER,
    TheoremId.TWO_BARRIER: Direction.EXACT,
    TheoremId.ONE_BARRIER: Direction.EXACT,
    TheoremId.MORAN_POTENTIAL: Direction.UPPER,
    TheoremId.MORAN_NEUTRAL: Direction.UPPER,
}


@dataclass(frozen=True)
class BoundReport:
    theorem_id: TheoremId
    inputs: dict[str, float]
    bound: float
    direction: Direction = None  # type: ignore[assignment]
    error: float = 0.0

    def __post_init__(self):
        tid = TheoremId(self.theorem_id)
        object.__setattr__(self, "theorem_id", tid)
        expected = THEOREM_DIRECTION[tid]
        if self.direction is None:
            object.__setattr__(self, "direction", expected)
        elif Direction(self.direction) is not expected:
            raise ValueError(f"{tid.value} is a {expected.value} bound")
        else:
            object.__setattr__(self, "direction", Direction(self.direction))
        if not self.bound >= 0:
            raise ValueError(f"bound must be nonnegative, got {self.bound}")

    def to_dict(self) -> dict[str, Any]:
        d = {
            "theorem_id": self.theorem_id.value,
            "direction": self.direction.value,
            "inputs": dict(self.inputs),
            "bound": self.bound,
        }
        if self.error:
            d["error"] = self.error
        return d


@dataclass(frozen=True)
class HittingTimeSample:
    steps: int
    censored: bool = False


@dataclass(frozen=True)
class Trajectory:
    seed: int
    potentials: tuple[float, ...]
    hit: HittingTimeSample


@dataclass(frozen=True)
class Process:
    """A Markov chain with a step kernel, a potential and an absorption test.

    ``initial`` is either a state or a callable drawing one from the
    replicate's stream (RECOLOUR and 2-SAT start from random assignments).
    ``fast_run``, when present, is a compiled equivalent of repeatedly calling
    ``step`` from the initial state; it must consume the stream identically
    and return ``(steps, censored)``.
    """

    name: str
    initial: Any
    step: Callable[[Any, np.random.Generator], Any]
    potential: Callable[[Any], float]
    absorbed: Callable[[Any], bool]
    fast_run: Callable[[np.random.Generator, int], tuple[int, bool]] | None = field(
        default=None, compare=False
    )

    def start(self, rng: np.random.Generator):
        return self.initial(rng) if callable(self.initial) else self.initial


def run(process: Process, seed: int, max_steps: int, record: bool = False):
    """Simulate one replicate from ``seed``.

    Returns a :class:`Trajectory` when ``record`` is set, otherwise a
    :class:`HittingTimeSample`.
    """
    rng = make_stream(seed)
    if process.fast_run is not None and not record:
        steps, censored = process.fast_run(rng, max_steps)
        return HittingTimeSample(int(steps), bool(censored))
    state = process.start(rng)
    potentials = [float(process.potential(state))] if record else None
    t = 0
    while not process.absorbed(state):
        if t >= max_steps:
            break
        state = process.step(state, rng)
        t += 1
        if record:
            potentials.append(float(process.potential(state)))
    hit = HittingTimeSample(t, not process.absorbed(state))
    if record:
        return Trajectory(seed, tuple(potentials), hit)
    return hit


def harmonic(n: int) -> float:
    return math.fsum(1.0 / i for i in range(1, n + 1))
