"""Planted instance generators and the plain-text instance formats.

Edge lists hold one ``u v`` pair per line with 0-indexed vertices; a leading
``# vertices N`` comment fixes the vertex count (otherwise it is one more than
the largest label).  Colourings hold one ``v c`` pair per line.  2-SAT
formulas are DIMACS CNF; the generator records its planted assignment in a
``c planted`` comment line.
"""
from __future__ import annotations

import os
import tempfile
from pathlib import Path

from ..core import make_stream
from .twosat import TwoSatFormula
from .vertex_cover import Graph


class InstanceFormatError(ValueError):
    pass


def gen_planted_3colorable(n: int, edge_prob: float, seed: int) -> tuple[Graph, tuple[int, ...]]:
    """Random graph over a uniformly random 3-partition; only cross-class edges."""
    if n < 3:
        raise ValueError("n must be >= 3")
    if not 0 <= edge_prob <= 1:
        raise ValueError("edge_prob must lie in [0, 1]")
    rng = make_stream(seed)
    chi = tuple(int(c) + 1 for c in rng.integers(0, 3, size=n))
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if chi[u] != chi[v] and rng.random() < edge_prob:
                edges.append((u, v))
    return Graph(n, tuple(edges)), chi


def gen_planted_2sat(n_vars: int, n_clauses: int, seed: int) -> tuple[TwoSatFormula, tuple[bool, ...]]:
    """Clauses over two distinct variables, each with a literal true under ``a``."""
    if n_vars < 2:
        raise ValueError("n_vars must be >= 2")
    rng = make_stream(seed)
    a = tuple(bool(x) for x in rng.integers(0, 2, size=n_vars))
    clauses = []
    while len(clauses) < n_clauses:
        x, y = (int(v) + 1 for v in rng.choice(n_vars, size=2, replace=False))
        sx, sy = rng.integers(0, 2, size=2)
        lx = x if sx else -x
        ly = y if sy else -y
        truth = lambda lit: a[abs(lit) - 1] if lit > 0 else not a[abs(lit) - 1]  # noqa: E731
        if truth(lx) or truth(ly):
            clauses.append((lx, ly))
    return TwoSatFormula(n_vars, tuple(clauses)), a


def gen_planted_cover_graph(n: int, cover_size: int, edge_prob: float, seed: int) -> tuple[Graph, frozenset[int]]:
    """Random graph whose every edge touches a planted set of ``cover_size`` vertices."""
    if not 0 <= cover_size <= n:
        raise ValueError("cover_size must lie in [0, n]")
    rng = make_stream(seed)
    cover = frozenset(int(v) for v in rng.choice(n, size=cover_size, replace=False))
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if (u in cover or v in cover) and rng.random() < edge_prob:
                edges.append((u, v))
    return Graph(n, tuple(edges)), cover


def gen_random_graph(n: int, edge_prob: float, seed: int) -> Graph:
    rng = make_stream(seed)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < edge_prob]
    return Graph(n, tuple(edges))


def find_3_coloring(graph: Graph) -> tuple[int, ...] | None:
    """A proper 3-colouring by backtracking (highest degree first), or ``None``."""
    adj = graph.adjacency()
    order = sorted(range(graph.n), key=lambda v: -len(adj[v]))
    colors = [0] * graph.n

    def place(i):
        if i == len(order):
            return True
        v = order[i]
        for c in (1, 2, 3):
            if all(colors[w] != c for w in adj[v]):
                colors[v] = c
                if place(i + 1):
                    return True
        colors[v] = 0
        return False

    return tuple(colors) if place(0) else None


# ---------------------------------------------------------------- file formats


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to a temporary file beside ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_edge_list(graph: Graph) -> str:
    lines = [f"# vertices {graph.n}"] + [f"{u} {v}" for u, v in graph.edges]
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    n = None
    edges = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "vertices":
                n = int(parts[1])
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InstanceFormatError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise InstanceFormatError(f"line {lineno}: non-integer vertex in {raw!r}") from None
        if u < 0 or v < 0:
            raise InstanceFormatError(f"line {lineno}: negative vertex label")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise InstanceFormatError(f"line {lineno}: duplicate edge {key}")
        seen.add(key)
        edges.append((u, v))
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    try:
        return Graph(n, tuple(edges))
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from None


def read_edge_list(path) -> Graph:
    return parse_edge_list(Path(path).read_text(encoding="utf-8"))


def write_edge_list(path, graph: Graph) -> None:
    atomic_write(path, format_edge_list(graph))


def format_coloring(coloring) -> str:
    return "".join(f"{v} {c}\n" for v, c in enumerate(coloring))


def parse_coloring(text: str, n: int) -> tuple[int, ...]:
    colors = [0] * n
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InstanceFormatError(f"line {lineno}: expected 'v c', got {raw!r}")
        v, c = int(parts[0]), int(parts[1])
        if not 0 <= v < n:
            raise InstanceFormatError(f"line {lineno}: vertex {v} outside 0..{n - 1}")
        colors[v] = c
    if 0 in colors:
        raise InstanceFormatError("colouring does not cover every vertex")
    return tuple(colors)


def format_dimacs(formula: TwoSatFormula, planted=None) -> str:
    lines = []
    if planted is not None:
        lits = [str(i + 1 if b else -(i + 1)) for i, b in enumerate(planted)]
        lines.append("c planted " + " ".join(lits))
    lines.append(f"p cnf {formula.n_vars} {len(formula.clauses)}")
    lines += [f"{a} {b} 0" for a, b in formula.clauses]
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> tuple[TwoSatFormula, tuple[bool, ...] | None]:
    n_vars = n_clauses = None
    planted = None
    clauses = []
    pending: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line.split()
            if len(parts) >= 2 and parts[1] == "planted":
                planted = {abs(int(x)): int(x) > 0 for x in parts[2:]}
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InstanceFormatError(f"line {lineno}: bad problem line {raw!r}")
            n_vars, n_clauses = int(parts[2]), int(parts[3])
            continue
        if n_vars is None:
            raise InstanceFormatError(f"line {lineno}: clause before problem line")
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                if len(pending) != 2:
                    raise InstanceFormatError(
                        f"line {lineno}: clause with {len(pending)} literals; only 2-literal clauses are accepted"
                    )
                clauses.append(tuple(pending))
                pending = []
            else:
                pending.append(lit)
    if pending:
        raise InstanceFormatError("unterminated clause at end of file")
    if n_vars is None:
        raise InstanceFormatError("missing problem line")
    if n_clauses is not None and n_clauses != len(clauses):
        raise InstanceFormatError(f"problem line declares {n_clauses} clauses, found {len(clauses)}")
    try:
        formula = TwoSatFormula(n_vars, tuple(clauses))
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from None
    ref = None
    if planted is not None:
        ref = tuple(planted.get(i, False) for i in range(1, n_vars + 1))
    return formula, ref


def read_dimacs(path):
    return parse_dimacs(Path(path).read_text(encoding="utf-8"))


def write_dimacs(path, formula: TwoSatFormula, planted=None) -> None:
    atomic_write(path, format_dimacs(formula, planted))


def random_permutation(n: int, seed: int) -> tuple[int, ...]:
    return tuple(int(x) for x in make_stream(seed).permutation(n))

