"""Exact reference values: absorption times of birth-death and small dense
chains, minimum vertex covers by exhaustive search, and the coupon collector
expectation.  Everything the simulation tests compare against comes from here.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .core import harmonic


class SingularChainError(ValueError):
    """Some transient state cannot reach an absorbing state."""


@dataclass(frozen=True)
class BirthDeathChain:
    """Chain on ``{0..n}``; ``up[k]`` and ``down[k]`` for every state ``k``.

    States listed in ``absorbing`` never move.  Entries of ``up``/``down`` at
    absorbing states are ignored.
    """

    n: int
    up: tuple[float, ...]
    down: tuple[float, ...]
    absorbing: frozenset[int]

    def __post_init__(self):
        if len(self.up) != self.n + 1 or len(self.down) != self.n + 1:
            raise ValueError("up/down must have n + 1 entries")
        if not self.absorbing:
            raise ValueError("at least one absorbing state is required")
        for k in range(self.n + 1):
            if k in self.absorbing:
                continue
            if self.up[k] < 0 or self.down[k] < 0 or self.up[k] + self.down[k] > 1 + 1e-12:
                raise ValueError(f"invalid transition probabilities at state {k}")
            if (k == self.n and self.up[k] > 0) or (k == 0 and self.down[k] > 0):
                raise ValueError(f"state {k} would leave {{0..n}}")

    @classmethod
    def two_barrier(cls, n: int, p: float) -> "BirthDeathChain":
        up = tuple([0.0] + [p] * (n - 1) + [0.0])
        return cls(n, up, up, frozenset({0, n}))

    @classmethod
    def one_barrier(cls, n: int, p: float) -> "BirthDeathChain":
        # at 0 the walk moves to 1 w.p. 2p (the mirror image of a symmetric walk)
        up = tuple([2 * p] + [p] * (n - 1) + [0.0])
        down = tuple([0.0] + [p] * (n - 1) + [0.0])
        return cls(n, up, down, frozenset({n}))

    @classmethod
    def moran(cls, n: int, r: float) -> "BirthDeathChain":
        from .bounds import MoranParameters, moran_p

        ps = [0.0] + [moran_p(MoranParameters(n, r, k)) for k in range(1, n)] + [0.0]
        return cls(n, tuple(ps), tuple(r * q for q in ps), frozenset({0, n}))


def thomas_solve(lower, diag, upper, rhs) -> np.ndarray:
    """Solve a tridiagonal system; ``lower[0]`` and ``upper[-1]`` are unused."""
    m = len(diag)
    c = np.empty(m)
    d = np.empty(m)
    c[0] = upper[0] / diag[0] if m > 1 else 0.0
    d[0] = rhs[0] / diag[0]
    for i in range(1, m):
        denom = diag[i] - lower[i] * c[i - 1]
        if denom == 0:
            raise SingularChainError("zero pivot in tridiagonal solve")
        c[i] = upper[i] / denom if i < m - 1 else 0.0
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom
    x = np.empty(m)
    x[-1] = d[-1]
    for i in range(m - 2, -1, -1):
        x[i] = d[i] - c[i] * x[i + 1]
    return x


def _tridiag_matvec(lower, diag, upper, x):
    y = diag * x
    y[1:] += lower[1:] * x[:-1]
    y[:-1] += upper[:-1] * x[1:]
    return y


def _transient_reachable(chain: BirthDeathChain) -> list[int]:
    # transient states that can reach an absorbing state
    ok = set(chain.absorbing)
    changed = True
    while changed:
        changed = False
        for k in range(chain.n + 1):
            if k in ok:
                continue
            if (chain.up[k] > 0 and k + 1 in ok) or (chain.down[k] > 0 and k - 1 in ok):
                ok.add(k)
                changed = True
    return sorted(ok - chain.absorbing)


def birth_death_absorption_times(chain: BirthDeathChain) -> np.ndarray:
    """Expected absorption time from every state ``0..n``.

    Solves ``(u_k + d_k) t_k - u_k t_{k+1} - d_k t_{k-1} = 1`` on each
    maximal run of transient states with the Thomas algorithm, followed by one
    step of iterative refinement.
    """
    n = chain.n
    transient = [k for k in range(n + 1) if k not in chain.absorbing]
    reachable = set(_transient_reachable(chain))
    stuck = [k for k in transient if k not in reachable]
    if stuck:
        raise SingularChainError(f"states {stuck} never reach an absorbing state")
    times = np.zeros(n + 1)
    # absorbing states split {0..n} into independent runs
    runs, current = [], []
    for k in range(n + 1):
        if k in chain.absorbing:
            if current:
                runs.append(current)
            current = []
        else:
            current.append(k)
    if current:
        runs.append(current)
    for run in runs:
        idx = np.array(run)
        up = np.array([chain.up[k] for k in run])
        down = np.array([chain.down[k] for k in run])
        diag = up + down
        lower = -down
        upper = -up
        rhs = np.ones(len(run))
        x = thomas_solve(lower, diag, upper, rhs)
        resid = rhs - _tridiag_matvec(lower, diag, upper, x)
        x = x + thomas_solve(lower, diag, upper, resid)
        resid = rhs - _tridiag_matvec(lower, diag, upper, x)
        if np.max(np.abs(resid)) > 1e-9 * max(1.0, np.max(np.abs(x))):
            raise SingularChainError("tridiagonal solve did not converge")
        times[idx] = x
    return times


def birth_death_absorption_time(chain: BirthDeathChain, start: int) -> float:
    if not 0 <= start <= chain.n:
        raise ValueError(f"start={start} outside [0, {chain.n}]")
    if start in chain.absorbing:
        return 0.0
    return float(birth_death_absorption_times(chain)[start])


@dataclass(frozen=True)
class DenseChain:
    states: tuple[Hashable, ...]
    transition: np.ndarray
    absorbing: frozenset

    def __post_init__(self):
        P = np.asarray(self.transition, dtype=float)
        m = len(self.states)
        if P.shape != (m, m):
            raise ValueError("transition matrix shape does not match states")
        if np.any(P < 0) or np.max(np.abs(P.sum(axis=1) - 1.0)) > 1e-12:
            raise ValueError("transition matrix must be row-stochastic")
        if not self.absorbing:
            raise ValueError("at least one absorbing state is required")
        object.__setattr__(self, "transition", P)

    @classmethod
    def from_birth_death(cls, chain: BirthDeathChain) -> "DenseChain":
        m = chain.n + 1
        P = np.zeros((m, m))
        for k in range(m):
            if k in chain.absorbing:
                P[k, k] = 1.0
                continue
            if chain.up[k]:
                P[k, k + 1] = chain.up[k]
            if chain.down[k]:
                P[k, k - 1] = chain.down[k]
            P[k, k] = 1.0 - chain.up[k] - chain.down[k]
        return cls(tuple(range(m)), P, frozenset(chain.absorbing))


def dense_absorption_times(chain: DenseChain) -> dict:
    """Expected absorption time from every state via ``(I - Q) t = 1``."""
    index = {s: i for i, s in enumerate(chain.states)}
    absorbing = {index[s] for s in chain.absorbing}
    P = chain.transition
    m = len(chain.states)
    # every state must reach an absorbing one
    reach = set(absorbing)
    frontier = list(absorbing)
    Pt = P.T
    while frontier:
        j = frontier.pop()
        for i in np.nonzero(Pt[j] > 0)[0]:
            if i not in reach:
                reach.add(int(i))
                frontier.append(int(i))
    if len(reach) < m:
        stuck = [chain.states[i] for i in range(m) if i not in reach]
        raise SingularChainError(f"states {stuck[:5]} never reach an absorbing state")
    transient = [i for i in range(m) if i not in absorbing]
    out = {s: 0.0 for s in chain.states}
    if not transient:
        return out
    Q = P[np.ix_(transient, transient)]
    A = np.eye(len(transient)) - Q
    b = np.ones(len(transient))
    try:
        t = np.linalg.solve(A, b)
        t = t + np.linalg.solve(A, b - A @ t)
    except np.linalg.LinAlgError as exc:
        raise SingularChainError(str(exc)) from exc
    for i, v in zip(transient, t):
        out[chain.states[i]] = float(v)
    return out


def dense_absorption_time(chain: DenseChain, start) -> float:
    if start in chain.absorbing:
        return 0.0
    return dense_absorption_times(chain)[start]


def min_vertex_cover(n_vertices: int, edges: Sequence[tuple[int, int]]) -> frozenset[int]:
    """A minimum vertex cover by exhaustive branch and bound.

    Any cover contains an endpoint of the first uncovered edge, so the search
    branches on those two endpoints and prunes branches whose size plus a
    greedy matching of the remaining edges (a lower bound) cannot beat the
    best cover found so far.
    """
    if n_vertices > 24:
        raise ValueError("brute-force vertex cover is limited to 24 vertices")
    edges = [(int(u), int(v)) for u, v in edges]
    best = frozenset(x for e in edges for x in e)

    def matching_size(remaining):
        used, seen = 0, 0
        for u, v in remaining:
            if not (seen >> u) & 1 and not (seen >> v) & 1:
                seen |= (1 << u) | (1 << v)
                used += 1
        return used

    def search(remaining, chosen):
        nonlocal best
        if not remaining:
            if len(chosen) < len(best):
                best = frozenset(chosen)
            return
        if len(chosen) + matching_size(remaining) >= len(best):
            return
        for x in remaining[0]:
            search([e for e in remaining if x not in e], chosen + [x])

    search(edges, [])
    return best


def brute_force_min_vertex_cover(n_vertices: int, edges: Sequence[tuple[int, int]]) -> int:
    return len(min_vertex_cover(n_vertices, edges))


def coupon_collector_exact(n: int) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    return n * harmonic(n)


def two_sat_dense_chain(n_vars: int, clauses: Sequence[tuple[int, int]]) -> DenseChain:
    """Chain over all ``2^n_vars`` assignments of the random-walk 2-SAT algorithm.

    From a non-satisfying assignment, each unsatisfied clause is chosen with
    equal probability and one of its two literals' variables is flipped with
    probability 1/2.  States are bit masks (bit ``v-1`` set means variable
    ``v`` is true); satisfying assignments are absorbing.
    """
    if n_vars > 12:
        # the transition matrix is dense: 2^12 states already take 128 MiB
        raise ValueError("dense 2-SAT chain is limited to 12 variables")
    m = 1 << n_vars

    def holds(lit, mask):
        bit = (mask >> (abs(lit) - 1)) & 1
        return bool(bit) if lit > 0 else not bit

    P = np.zeros((m, m))
    absorbing = set()
    for mask in range(m):
        unsat = [c for c in clauses if not (holds(c[0], mask) or holds(c[1], mask))]
        if not unsat:
            P[mask, mask] = 1.0
            absorbing.add(mask)
            continue
        w = 1.0 / (2 * len(unsat))
        for a, b in unsat:
            for lit in (a, b):
                P[mask, mask ^ (1 << (abs(lit) - 1))] += w
    return DenseChain(tuple(range(m)), P, frozenset(absorbing))
