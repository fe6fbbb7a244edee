"""Drift-theorem hitting-time bounds, exact oracles, simulations and checks."""
from .core import (
    BoundReport,
    Direction,
    HittingTimeSample,
    Process,
    TheoremId,
    Trajectory,
    derive_replicate_seed,
    make_stream,
    run,
)

__version__ = "0.1.0"
