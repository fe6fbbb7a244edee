"""Randomized 2-approximation for vertex cover."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Process, uniform_index


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0..n-1``; edges stored as ``(u, v)``, ``u < v``."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        norm = []
        seen = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) outside 0..{self.n - 1}")
            e = (min(u, v), max(u, v))
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
            norm.append(e)
        object.__setattr__(self, "edges", tuple(norm))

    def adjacency(self) -> list[set[int]]:
        adj = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


@dataclass(frozen=True)
class VertexCoverState:
    graph: Graph
    chosen: frozenset[int]
    reference_cover: frozenset[int]
    uncovered: tuple[int, ...] = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.uncovered is None:
            unc = tuple(
                i
                for i, (u, v) in enumerate(self.graph.edges)
                if u not in self.chosen and v not in self.chosen
            )
            object.__setattr__(self, "uncovered", unc)

    @property
    def absorbed(self) -> bool:
        return not self.uncovered

    @property
    def potential(self) -> float:
        if self.absorbed:
            return 0.0
        return float(len(self.reference_cover - self.chosen))


def step_vertex_cover(state: VertexCoverState, rng: np.random.Generator) -> VertexCoverState:
    """Add a random endpoint of a uniformly chosen uncovered edge."""
    if state.absorbed:
        return state
    e = state.uncovered[uniform_index(rng.random(), len(state.uncovered))]
    u, v = state.graph.edges[e]
    x = u if rng.random() < 0.5 else v
    edges = state.graph.edges
    remaining = tuple(i for i in state.uncovered if x not in edges[i])
    return VertexCoverState(state.graph, state.chosen | {x}, state.reference_cover, remaining)


def vertex_cover_process(graph: Graph, reference_cover) -> Process:
    """The step count at absorption equals the size of the constructed cover."""
    ref = frozenset(reference_cover)
    if any(u not in ref and v not in ref for u, v in graph.edges):
        raise ValueError("reference_cover does not cover the graph")
    return Process(
        name="vertex_cover",
        initial=VertexCoverState(graph, frozenset(), ref),
        step=step_vertex_cover,
        potential=lambda s: s.potential,
        absorbed=lambda s: s.absorbed,
    )
