"""RECOLOUR: 2-colour a graph so that no triangle is monochromatic."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..core import Process, uniform_index
from .vertex_cover import Graph


def triangles(graph: Graph) -> tuple[tuple[int, int, int], ...]:
    adj = graph.adjacency()
    out = []
    for u, v in graph.edges:
        for w in sorted(adj[u] & adj[v]):
            if w > v:
                out.append((u, v, w))
    return tuple(sorted(out))


@dataclass(frozen=True)
class RecolourInstance:
    """A graph with a proper 3-colouring ``chi`` (colours 1, 2, 3) for analysis."""

    graph: Graph
    chi: tuple[int, ...]

    def __post_init__(self):
        if len(self.chi) != self.graph.n:
            raise ValueError("chi must colour every vertex")
        if any(c not in (1, 2, 3) for c in self.chi):
            raise ValueError("chi must use colours 1, 2, 3")
        for u, v in self.graph.edges:
            if self.chi[u] == self.chi[v]:
                raise ValueError(f"chi is not proper on edge ({u}, {v})")

    @cached_property
    def triangles(self) -> tuple[tuple[int, int, int], ...]:
        return triangles(self.graph)

    @cached_property
    def incident(self) -> tuple[tuple[int, ...], ...]:
        inc = [[] for _ in range(self.graph.n)]
        for t, tri in enumerate(self.triangles):
            for x in tri:
                inc[x].append(t)
        return tuple(tuple(ts) for ts in inc)

    @cached_property
    def U(self) -> tuple[int, ...]:
        return tuple(v for v, c in enumerate(self.chi) if c in (1, 2))


@dataclass(frozen=True)
class RecolourState:
    instance: RecolourInstance
    coloring: tuple[int, ...]
    mono: tuple[int, ...] = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.mono is None:
            c = self.coloring
            mono = tuple(
                t for t, (a, b, d) in enumerate(self.instance.triangles) if c[a] == c[b] == c[d]
            )
            object.__setattr__(self, "mono", mono)

    @property
    def absorbed(self) -> bool:
        return not self.mono

    @property
    def agreement(self) -> int:
        chi = self.instance.chi
        return sum(1 for u in self.instance.U if self.coloring[u] == chi[u])

    @property
    def potential(self) -> float:
        y = self.agreement
        return float(min(y, len(self.instance.U) - y))


def step_recolour(state: RecolourState, rng: np.random.Generator) -> RecolourState:
    """Flip a uniformly chosen vertex of a uniformly chosen monochromatic triangle.

    The set of monochromatic triangles is updated only on triangles through
    the flipped vertex.
    """
    if state.absorbed:
        return state
    inst = state.instance
    t = state.mono[uniform_index(rng.random(), len(state.mono))]
    x = inst.triangles[t][uniform_index(rng.random(), 3)]
    c = list(state.coloring)
    c[x] = 3 - c[x]
    touched = set(inst.incident[x])
    mono = {m for m in state.mono if m not in touched}
    for m in touched:
        a, b, d = inst.triangles[m]
        if c[a] == c[b] == c[d]:
            mono.add(m)
    return RecolourState(inst, tuple(c), tuple(sorted(mono)))


def random_coloring(n: int, rng: np.random.Generator) -> tuple[int, ...]:
    return tuple(1 if rng.random() < 0.5 else 2 for _ in range(n))


def recolour_process(instance: RecolourInstance, coloring: tuple[int, ...] | None = None) -> Process:
    """RECOLOUR from ``coloring``, or from a uniformly random 2-colouring.

    The potential ``min(Y, |U| - Y)`` (``Y`` = vertices of ``U`` agreeing with
    ``chi``) reaching 0 implies absorption; the algorithm may stop earlier.
    """
    if coloring is None:
        initial = lambda rng: RecolourState(instance, random_coloring(instance.graph.n, rng))  # noqa: E731
    else:
        initial = RecolourState(instance, tuple(coloring))
    return Process(
        name="recolour",
        initial=initial,
        step=step_recolour,
        potential=lambda s: s.potential,
        absorbed=lambda s: s.absorbed,
    )
