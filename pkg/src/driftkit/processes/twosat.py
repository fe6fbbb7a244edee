"""Random-walk 2-SAT: flip a variable of a uniformly chosen unsatisfied clause."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import networkx as nx
import numpy as np

from ..core import Process, uniform_index


@dataclass(frozen=True)
class TwoSatFormula:
    """Clauses of DIMACS literals over variables ``1..n_vars``."""

    n_vars: int
    clauses: tuple[tuple[int, int], ...]

    def __post_init__(self):
        norm = []
        for clause in self.clauses:
            clause = tuple(int(x) for x in clause)
            if len(clause) != 2:
                raise ValueError(f"clause {clause} does not have exactly two literals")
            for lit in clause:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise ValueError(f"literal {lit} outside 1..{self.n_vars}")
            norm.append(clause)
        object.__setattr__(self, "clauses", tuple(norm))

    @cached_property
    def occurrences(self) -> tuple[tuple[int, ...], ...]:
        occ = [[] for _ in range(self.n_vars + 1)]
        for c, (a, b) in enumerate(self.clauses):
            occ[abs(a)].append(c)
            if abs(b) != abs(a):
                occ[abs(b)].append(c)
        return tuple(tuple(x) for x in occ)

    def satisfied_by(self, assignment: Sequence[bool], clause: int) -> bool:
        return any(_lit_true(lit, assignment) for lit in self.clauses[clause])

    def satisfies(self, assignment: Sequence[bool]) -> bool:
        return all(self.satisfied_by(assignment, c) for c in range(len(self.clauses)))


def _lit_true(lit: int, assignment: Sequence[bool]) -> bool:
    # assignment is 0-indexed: variable v lives at assignment[v - 1]
    value = assignment[abs(lit) - 1]
    return value if lit > 0 else not value


def solve_2sat(formula: TwoSatFormula) -> tuple[bool, ...] | None:
    """A satisfying assignment via strongly connected components, or ``None``."""
    g = nx.DiGraph()
    g.add_nodes_from(v for x in range(1, formula.n_vars + 1) for v in (x, -x))
    for a, b in formula.clauses:
        g.add_edge(-a, b)
        g.add_edge(-b, a)
    comp = {}
    cond = nx.condensation(g)
    for node, data in cond.nodes(data=True):
        for lit in data["members"]:
            comp[lit] = node
    order = {node: i for i, node in enumerate(nx.topological_sort(cond))}
    out = []
    for x in range(1, formula.n_vars + 1):
        if comp[x] == comp[-x]:
            return None
        # a literal later in topological order is implied, so make it true
        out.append(order[comp[x]] > order[comp[-x]])
    return tuple(out)


@dataclass(frozen=True)
class TwoSatState:
    formula: TwoSatFormula
    assignment: tuple[bool, ...]
    reference: tuple[bool, ...]
    unsat: tuple[int, ...] = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.unsat is None:
            unsat = tuple(
                c for c in range(len(self.formula.clauses)) if not self.formula.satisfied_by(self.assignment, c)
            )
            object.__setattr__(self, "unsat", unsat)

    @property
    def absorbed(self) -> bool:
        return not self.unsat

    @property
    def agreement(self) -> int:
        return sum(1 for a, b in zip(self.assignment, self.reference) if a == b)

    @property
    def potential(self) -> float:
        return float(self.formula.n_vars - self.agreement)


def step_two_sat(state: TwoSatState, rng: np.random.Generator) -> TwoSatState:
    if state.absorbed:
        return state
    f = state.formula
    c = state.unsat[uniform_index(rng.random(), len(state.unsat))]
    lit = f.clauses[c][0] if rng.random() < 0.5 else f.clauses[c][1]
    var = abs(lit)
    a = list(state.assignment)
    a[var - 1] = not a[var - 1]
    touched = set(f.occurrences[var])
    unsat = {u for u in state.unsat if u not in touched}
    unsat.update(u for u in touched if not f.satisfied_by(a, u))
    return TwoSatState(f, tuple(a), state.reference, tuple(sorted(unsat)))


def random_assignment(n: int, rng: np.random.Generator) -> tuple[bool, ...]:
    return tuple(rng.random() < 0.5 for _ in range(n))


def two_sat_process(
    formula: TwoSatFormula,
    reference: Sequence[bool] | None = None,
    assignment: Sequence[bool] | None = None,
) -> Process:
    """Random-walk 2-SAT from ``assignment`` or a uniformly random one.

    ``reference`` is a satisfying assignment used only for the potential
    (number of variables disagreeing with it); it is computed if omitted.
    """
    if reference is None:
        reference = solve_2sat(formula)
        if reference is None:
            raise ValueError("formula is unsatisfiable")
    reference = tuple(bool(x) for x in reference)
    if len(reference) != formula.n_vars or not formula.satisfies(reference):
        raise ValueError("reference assignment does not satisfy the formula")
    if assignment is None:
        initial = lambda rng: TwoSatState(formula, random_assignment(formula.n_vars, rng), reference)  # noqa: E731
    else:
        initial = TwoSatState(formula, tuple(bool(x) for x in assignment), reference)
    return Process(
        name="two_sat",
        initial=initial,
        step=step_two_sat,
        potential=lambda s: s.potential,
        absorbed=lambda s: s.absorbed,
    )
