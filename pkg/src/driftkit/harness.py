"""Replicated Monte Carlo runs, summary statistics and bound verdicts.

Replicate ``i`` always runs on the stream seeded by
``derive_replicate_seed(master_seed, i)``; the work is split into contiguous
index blocks across threads and reassembled in index order, so every output
is a function of the configuration alone.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
from scipy import stats

from . import bounds
from .core import BoundReport, Direction, HittingTimeSample, Process, TheoremId, Trajectory, derive_replicate_seed, run
from .oracle import min_vertex_cover
from .processes import (
    RecolourInstance,
    barrier_process,
    coupon_process,
    find_3_coloring,
    gamblers_ruin_process,
    gen_adjacent_swapped,
    gen_planted_2sat,
    gen_planted_3colorable,
    gen_planted_cover_graph,
    moran_process,
    random_permutation_sort,
    read_dimacs,
    read_edge_list,
    recolour_process,
    sort_process,
    two_sat_process,
    vertex_cover_process,
)
from .processes.instances import atomic_write, parse_coloring

DEFAULT_MAX_STEPS = 10_000_000
QUANTILES = (5, 25, 50, 75, 95)
CONFIG_KEYS = {
    "process",
    "params",
    "replicates",
    "master_seed",
    "max_steps",
    "outputs",
    "record_trajectories",
    "bounds",
}
OUTPUT_KEYS = {"samples", "trajectories", "summary", "histogram", "figure"}


class ConfigError(ValueError):
    pass


class Verdict(str, Enum):
    CONSISTENT = "consistent"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"


# ------------------------------------------------------------------ processes


@dataclass
class BuiltProcess:
    process: Process
    bounds: dict[str, BoundReport]
    tail: tuple[float, float] | None = None  # (s, delta) for the multiplicative tail
    info: dict[str, Any] = field(default_factory=dict)


def _resolve(path: str, base: Path | None) -> Path:
    p = Path(path)
    return p if p.is_absolute() or base is None else base / p


def _need(params: dict, *names):
    missing = [n for n in names if n not in params]
    if missing:
        raise ConfigError(f"missing parameter(s) {missing}")
    return [params[n] for n in names]


def build_process(name: str, params: dict, base_dir: Path | None = None) -> BuiltProcess:
    """Instantiate a named process and the theorem bounds that apply to it."""
    params = dict(params or {})
    if name == "two_barrier":
        n, x0, p = _need(params, "n", "x0", "p")
        n, x0, p = int(n), int(x0), float(p)
        return BuiltProcess(
            barrier_process(n, x0, p, "two_barrier"),
            {
                "two_barrier": bounds.two_barrier_report(n, x0, p),
                "martingale_upper": bounds.martingale_report(0, n, x0, 2 * p, "upper"),
                "martingale_lower": bounds.martingale_report(0, n, x0, 2 * p, "lower"),
            },
        )
    if name == "one_barrier":
        n, p = _need(params, "n", "p")
        n, p = int(n), float(p)
        return BuiltProcess(
            barrier_process(n, 0, p, "one_barrier"),
            {"one_barrier": bounds.one_barrier_report(n, p)},
        )
    if name == "gamblers_ruin":
        (coins,) = _need(params, "coins")
        coins = int(coins)
        return BuiltProcess(
            gamblers_ruin_process(coins),
            {
                "two_barrier": bounds.two_barrier_report(2 * coins, coins, 0.5),
                "martingale_upper": bounds.martingale_report(0, 2 * coins, coins, 1.0, "upper"),
            },
        )
    if name == "coupon":
        (n,) = _need(params, "n")
        n = int(n)
        return BuiltProcess(
            coupon_process(n),
            {"multiplicative": bounds.multiplicative_report(n, 1.0 / n)},
            tail=(n, 1.0 / n),
        )
    if name == "coupon_per_kind":
        n, p = _need(params, "n", "p")
        n, p = int(n), float(p)
        return BuiltProcess(
            coupon_process(n, p),
            {"multiplicative": bounds.multiplicative_report(n, p)},
            tail=(n, p),
        )
    if name == "inversion_sort":
        n = len(params["entries"]) if "entries" in params else int(_need(params, "n")[0])
        pairs = n * (n - 1) // 2
        instance = "entries" if "entries" in params else params.get("instance", "random")
        if instance == "entries":
            proc = sort_process(params["entries"])
            x0 = proc.initial.inversions
        elif instance == "random":
            proc = random_permutation_sort(n)
            x0 = pairs / 2
        elif instance == "adjacent_swapped":
            proc = sort_process(gen_adjacent_swapped(n).entries)
            x0 = n // 2
        elif instance == "reversed":
            proc = sort_process(tuple(range(n, 0, -1)))
            x0 = pairs
        else:
            raise ConfigError(f"unknown inversion_sort instance {instance!r}")
        built = {}
        if x0 >= 1:
            built["multiplicative"] = bounds.multiplicative_report(x0, 1.0 / pairs)
        return BuiltProcess(proc, built, tail=(x0, 1.0 / pairs) if x0 >= 1 and instance != "random" else None)
    if name == "vertex_cover":
        if "graph" in params:
            graph = read_edge_list(_resolve(params["graph"], base_dir))
        else:
            n, cover_size, edge_prob, seed = _need(params, "n", "cover_size", "edge_prob", "seed")
            graph, _ = gen_planted_cover_graph(int(n), int(cover_size), float(edge_prob), int(seed))
        cover = min_vertex_cover(graph.n, graph.edges)
        return BuiltProcess(
            vertex_cover_process(graph, cover),
            {"additive_upper": bounds.additive_upper_report(len(cover), 0.5)},
            info={"opt": len(cover), "edges": len(graph.edges)},
        )
    if name == "moran":
        n, r = _need(params, "n", "r")
        n, r = int(n), float(r)
        start = int(params.get("start", n - 1))
        if abs(r - 1.0) < bounds.NEAR_NEUTRAL:
            built = {"moran_neutral": bounds.moran_neutral_report(n, start)}
        elif start == n - 1:
            built = {"moran_potential": bounds.moran_potential_report(n, r)}
        else:
            built = {}
        return BuiltProcess(moran_process(n, r, start), built)
    if name == "recolour":
        if "graph" in params:
            graph = read_edge_list(_resolve(params["graph"], base_dir))
            if "coloring" in params:
                chi = parse_coloring(_resolve(params["coloring"], base_dir).read_text(encoding="utf-8"), graph.n)
            else:
                chi = find_3_coloring(graph)
                if chi is None:
                    raise ConfigError("graph is not 3-colourable")
        else:
            n, edge_prob, seed = _need(params, "n", "edge_prob", "seed")
            graph, chi = gen_planted_3colorable(int(n), float(edge_prob), int(seed))
        inst = RecolourInstance(graph, tuple(chi))
        u = len(inst.U)
        built = {}
        if u >= 1:
            built["martingale_upper"] = bounds.martingale_report(0, u, u / 2, 2.0 / 3.0, "upper")
        return BuiltProcess(recolour_process(inst), built, info={"U": u, "triangles": len(inst.triangles)})
    if name == "two_sat":
        if "formula" in params:
            formula, planted = read_dimacs(_resolve(params["formula"], base_dir))
        else:
            n_vars, n_clauses, seed = _need(params, "n_vars", "n_clauses", "seed")
            formula, planted = gen_planted_2sat(int(n_vars), int(n_clauses), int(seed))
        n = formula.n_vars
        # dominated by the one-barrier walk with p = 1/2, i.e. the mirrored
        # two-barrier walk on [-n, n] from 0 with step variance 1
        return BuiltProcess(
            two_sat_process(formula, planted),
            {"martingale_upper": bounds.martingale_report(-n, n, 0, 1.0, "upper")},
            info={"n_vars": n, "clauses": len(formula.clauses)},
        )
    raise ConfigError(f"unknown process {name!r}")


def bound_from_inputs(theorem: str, inputs: dict) -> BoundReport:
    """Evaluate a theorem bound from explicitly named inputs."""
    tid = TheoremId(theorem)
    g = lambda key, default=None: inputs[key] if key in inputs else default  # noqa: E731
    try:
        if tid is TheoremId.ADDITIVE_UPPER:
            return bounds.additive_upper_report(float(g("x0_mean")), float(g("delta")))
        if tid is TheoremId.ADDITIVE_LOWER:
            c = g("step_bound")
            if c is None:
                raise ValueError("additive_lower needs step_bound")
            return bounds.additive_lower_report(float(g("x0_mean")), float(g("delta")), float(c))
        if tid is TheoremId.MULTIPLICATIVE:
            return bounds.multiplicative_report(float(g("x0_mean")), float(g("delta")))
        if tid is TheoremId.MULTIPLICATIVE_TAIL:
            return bounds.multiplicative_tail_report(float(g("s")), float(g("delta")), float(g("k")))
        if tid in (TheoremId.MARTINGALE_UPPER, TheoremId.MARTINGALE_LOWER):
            d = "upper" if tid is TheoremId.MARTINGALE_UPPER else "lower"
            return bounds.martingale_report(float(g("a")), float(g("b")), float(g("x0_mean")), float(g("delta_var")), d)
        if tid is TheoremId.TWO_BARRIER:
            return bounds.two_barrier_report(int(g("n")), int(g("x0")), float(g("p")))
        if tid is TheoremId.ONE_BARRIER:
            return bounds.one_barrier_report(int(g("n")), float(g("p")))
        if tid is TheoremId.MORAN_POTENTIAL:
            return bounds.moran_potential_report(int(g("n")), float(g("r")))
        if tid is TheoremId.MORAN_NEUTRAL:
            start = g("start")
            return bounds.moran_neutral_report(int(g("n")), None if start is None else int(start))
        if tid is TheoremId.VARIABLE:
            return _variable_from_inputs(inputs)
    except TypeError:
        raise ValueError(f"missing inputs for {tid.value}: got {sorted(inputs)}") from None
    raise ValueError(f"unsupported theorem {theorem!r}")


def _variable_from_inputs(inputs: dict) -> BoundReport:
    """``h`` given as ``{"h": "power", "coef": c, "exponent": e}``: h(x) = c x^e."""
    kind = inputs.get("h", "power")
    if kind != "power":
        raise ValueError("only power-law drift functions h(x) = coef * x**exponent are accepted")
    coef = float(inputs.get("coef", 1.0))
    expo = float(inputs.get("exponent", 0.0))
    tol = float(inputs.get("tol", bounds.QUAD_TOL))
    return bounds.variable_report(
        lambda x: coef * x**expo, float(inputs["x0_mean"]), tol, label=f"{coef:g}*x^{expo:g}"
    )


# ------------------------------------------------------------------ config


@dataclass
class ExperimentConfig:
    process: str
    params: dict
    replicates: int
    master_seed: int
    max_steps: int | None = None
    outputs: dict = field(default_factory=dict)
    record_trajectories: bool = False
    bounds: list = field(default_factory=list)
    base_dir: Path | None = None

    def __post_init__(self):
        if int(self.replicates) < 1:
            raise ConfigError("replicates must be >= 1")
        if self.max_steps is not None and int(self.max_steps) < 1:
            raise ConfigError("max_steps must be >= 1")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ConfigError("master_seed must be a 64-bit unsigned integer")
        unknown = set(self.outputs) - OUTPUT_KEYS
        if unknown:
            raise ConfigError(f"unknown output key(s) {sorted(unknown)}")
        if "trajectories" in self.outputs and not self.record_trajectories:
            raise ConfigError("trajectories output requested without record_trajectories")

    @classmethod
    def from_dict(cls, d: dict, base_dir: Path | None = None) -> "ExperimentConfig":
        unknown = set(d) - CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config key(s) {sorted(unknown)}")
        for key in ("process", "replicates", "master_seed"):
            if key not in d:
                raise ConfigError(f"config lacks {key!r}")
        return cls(
            process=d["process"],
            params=dict(d.get("params", {})),
            replicates=int(d["replicates"]),
            master_seed=int(d["master_seed"]),
            max_steps=None if d.get("max_steps") is None else int(d["max_steps"]),
            outputs=dict(d.get("outputs", {})),
            record_trajectories=bool(d.get("record_trajectories", False)),
            bounds=list(d.get("bounds", [])),
            base_dir=base_dir,
        )

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data, base_dir=path.parent)


def default_max_steps(built: BuiltProcess) -> int:
    for report in built.bounds.values():
        if report.direction in (Direction.UPPER, Direction.EXACT) and report.bound > 0:
            return max(1000, int(math.ceil(100 * report.bound)))
    return DEFAULT_MAX_STEPS


def thread_count() -> int:
    raw = os.environ.get("DRIFTKIT_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"DRIFTKIT_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ConfigError("DRIFTKIT_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


# ------------------------------------------------------------------ running


def simulate(
    process: Process,
    replicates: int,
    master_seed: int,
    max_steps: int,
    record: bool = False,
    threads: int | None = None,
    start_index: int = 0,
):
    """Run replicates ``start_index .. start_index + replicates - 1``.

    Returns the list of samples and, when ``record`` is set, the trajectories.
    """
    threads = thread_count() if threads is None else max(1, int(threads))
    indices = range(start_index, start_index + replicates)

    def work(block):
        return [run(process, derive_replicate_seed(master_seed, i), max_steps, record) for i in block]

    if threads == 1 or replicates < 2:
        results = work(indices)
    else:
        size = math.ceil(replicates / threads)
        blocks = [indices[i : i + size] for i in range(0, replicates, size)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = [r for part in pool.map(work, blocks) for r in part]
    if record:
        return [t.hit for t in results], results
    return results, None


def run_replicates(config: ExperimentConfig, threads: int | None = None, built: BuiltProcess | None = None):
    built = built or build_process(config.process, config.params, config.base_dir)
    max_steps = config.max_steps or default_max_steps(built)
    samples, trajectories = simulate(
        built.process, config.replicates, config.master_seed, max_steps, config.record_trajectories, threads
    )
    if all(s.censored for s in samples):
        warnings.warn(f"all {len(samples)} replicates hit max_steps={max_steps}", stacklevel=2)
    return samples, trajectories


# ------------------------------------------------------------------ statistics


@dataclass
class SummaryReport:
    n_replicates: int
    n_censored: int
    mean: float
    std: float
    quantiles: dict[int, float]
    ci95: tuple[float, float] | None
    ci_method: str
    bound_verdicts: list[tuple[BoundReport, Verdict]] = field(default_factory=list)
    tail_checks: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n_replicates": self.n_replicates,
            "n_censored": self.n_censored,
            "mean": self.mean,
            "std": self.std,
            "quantiles": {f"q{q:02d}": v for q, v in self.quantiles.items()},
            "ci95": None if self.ci95 is None else list(self.ci95),
            "ci_method": self.ci_method,
            "bound_verdicts": [
                {"bound": b.to_dict(), "verdict": v.value} for b, v in self.bound_verdicts
            ],
            "tail_checks": self.tail_checks,
        }

    @property
    def violated(self) -> bool:
        return any(v is Verdict.VIOLATED for _, v in self.bound_verdicts) or any(
            t["verdict"] == Verdict.VIOLATED.value for t in self.tail_checks
        )


def _steps(samples) -> np.ndarray:
    return np.array([s.steps if isinstance(s, HittingTimeSample) else s for s in samples], dtype=float)


def summarize(samples: Sequence, method: str = "auto", seed: int = 0, n_boot: int = 10_000) -> SummaryReport:
    """Mean, spread and 95% CI of the uncensored hitting times.

    ``method`` is ``"normal"``, ``"bootstrap"`` (percentile, ``n_boot``
    resamples from a stream seeded by ``seed``) or ``"auto"`` (normal from
    100 uncensored samples on, bootstrap below).
    """
    samples = [s if isinstance(s, HittingTimeSample) else HittingTimeSample(int(s)) for s in samples]
    censored = sum(s.censored for s in samples)
    x = np.array([s.steps for s in samples if not s.censored], dtype=float)
    if len(x) == 0:
        raise ValueError("all samples are censored")
    if censored:
        warnings.warn(f"{censored} censored sample(s) excluded from the mean", stacklevel=2)
    mean = float(np.mean(x))
    std = float(np.std(x, ddof=1)) if len(x) > 1 else 0.0
    quantiles = {q: float(v) for q, v in zip(QUANTILES, np.percentile(x, QUANTILES))}
    if method == "auto":
        method = "normal" if len(x) >= 100 else "bootstrap"
    ci = None
    if len(x) >= 2:
        if method == "normal":
            h = 1.959963984540054 * std / math.sqrt(len(x))
            ci = (mean - h, mean + h)
        elif method == "bootstrap":
            from .core import make_stream

            rng = make_stream(seed)
            idx = rng.integers(0, len(x), size=(n_boot, len(x)))
            means = x[idx].mean(axis=1)
            lo, hi = np.percentile(means, [2.5, 97.5])
            ci = (float(lo), float(hi))
        else:
            raise ValueError(f"unknown CI method {method!r}")
    return SummaryReport(len(samples), censored, mean, std, quantiles, ci, method)


def verify_bound(report: SummaryReport, bound: BoundReport) -> Verdict:
    """Compare the mean's CI against a theorem bound.

    Upper bounds are violated when the whole CI lies above them, lower bounds
    when it lies below, exact values when they fall outside.  Without a CI,
    or with censored samples where censoring could hide a violation, the
    verdict is inconclusive.
    """
    if report.ci95 is None:
        return Verdict.INCONCLUSIVE
    lo, hi = report.ci95
    b = bound.bound
    if bound.direction is Direction.UPPER:
        if lo > b:
            return Verdict.VIOLATED
        return Verdict.INCONCLUSIVE if report.n_censored else Verdict.CONSISTENT
    if bound.direction is Direction.LOWER:
        if hi < b:
            return Verdict.INCONCLUSIVE if report.n_censored else Verdict.VIOLATED
        return Verdict.CONSISTENT
    if lo <= b <= hi:
        return Verdict.CONSISTENT
    if report.n_censored and hi < b:
        return Verdict.INCONCLUSIVE
    return Verdict.VIOLATED


def tail_check(samples: Sequence, s: float, delta: float, ks: Iterable[float]) -> list[dict]:
    """Empirical ``Pr[T > (k + ln s)/delta]`` against ``e^-k`` for each ``k``.

    Censored samples count as exceedances when ``max_steps`` is beyond the
    threshold (they did run that long).  The 95% Clopper-Pearson interval of
    the exceedance decides the verdict.
    """
    steps = _steps(samples)
    n = len(steps)
    if n == 0:
        raise ValueError("no samples")
    out = []
    for k in ks:
        k = float(k)
        threshold = (k + math.log(s)) / delta
        bound = math.exp(-k)
        hits = int(np.sum(steps > threshold))
        frac = hits / n
        upper = 1.0 if hits == n else float(stats.beta.ppf(0.975, hits + 1, n - hits))
        lower = 0.0 if hits == 0 else float(stats.beta.ppf(0.025, hits, n - hits + 1))
        if frac <= bound or upper <= bound:
            verdict = Verdict.CONSISTENT
        elif lower > bound:
            verdict = Verdict.VIOLATED
        else:
            verdict = Verdict.INCONCLUSIVE
        out.append(
            {
                "k": k,
                "threshold": threshold,
                "exceedance": frac,
                "exceedance_ci95": [lower, upper],
                "bound": bound,
                "verdict": verdict.value,
            }
        )
    return out


# ------------------------------------------------------------------ outputs


def samples_csv(samples: Sequence[HittingTimeSample], master_seed: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["replicate_index", "seed", "steps", "censored"])
    for i, s in enumerate(samples):
        w.writerow([i, derive_replicate_seed(master_seed, i), s.steps, int(s.censored)])
    return buf.getvalue()


def trajectories_csv(trajectories: Sequence[Trajectory]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["replicate_index", "t", "potential"])
    for i, traj in enumerate(trajectories):
        for t, p in enumerate(traj.potentials):
            w.writerow([i, t, repr(float(p))])
    return buf.getvalue()


def histogram_csv(samples: Sequence[HittingTimeSample]) -> str:
    x = np.array([s.steps for s in samples if not s.censored], dtype=float)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["bin_lo", "bin_hi", "count"])
    if len(x):
        counts, edges = np.histogram(x, bins="auto")
        for lo, hi, c in zip(edges[:-1], edges[1:], counts):
            w.writerow([repr(float(lo)), repr(float(hi)), int(c)])
    return buf.getvalue()


def _bound_entries(config: ExperimentConfig, built: BuiltProcess):
    """Resolve the config's ``bounds`` list into bound reports and tail requests."""
    reports, tails = [], []
    for entry in config.bounds:
        if isinstance(entry, str):
            if entry == "multiplicative_tail":
                if built.tail is None:
                    raise ConfigError(f"no multiplicative tail bound for process {config.process!r}")
                tails.append((built.tail[0], built.tail[1], [1.0, 2.0, 3.0]))
            elif entry in built.bounds:
                reports.append(built.bounds[entry])
            else:
                raise ConfigError(
                    f"no {entry!r} bound for process {config.process!r}; available: {sorted(built.bounds)}"
                )
        elif isinstance(entry, dict):
            unknown = set(entry) - {"theorem", "inputs", "ks"}
            if unknown or "theorem" not in entry:
                raise ConfigError(f"bound entries need 'theorem' (and optional 'inputs'), got {sorted(entry)}")
            if entry["theorem"] == "multiplicative_tail":
                inputs = entry.get("inputs") or {}
                s, delta = (inputs.get("s"), inputs.get("delta")) if inputs else (None, None)
                if s is None or delta is None:
                    if built.tail is None:
                        raise ConfigError("multiplicative_tail needs inputs s and delta")
                    s, delta = built.tail
                tails.append((float(s), float(delta), [float(k) for k in entry.get("ks", [1, 2, 3])]))
            elif "inputs" not in entry:
                name = entry["theorem"]
                if name not in built.bounds:
                    raise ConfigError(f"no {name!r} bound for process {config.process!r}")
                reports.append(built.bounds[name])
            else:
                try:
                    reports.append(bound_from_inputs(entry["theorem"], entry["inputs"]))
                except ValueError as exc:
                    raise ConfigError(str(exc)) from None
        else:
            raise ConfigError(f"bad bound entry {entry!r}")
    return reports, tails


def run_experiment(config: ExperimentConfig, threads: int | None = None, verify: bool = True) -> SummaryReport:
    """Simulate, summarize, check the configured bounds and write outputs."""
    built = build_process(config.process, config.params, config.base_dir)
    if not verify:
        reports, tails = [], []
    elif config.bounds:
        reports, tails = _bound_entries(config, built)
    else:
        # no explicit checks: every bound that applies to the process
        reports = list(built.bounds.values())
        tails = [(built.tail[0], built.tail[1], [1.0, 2.0, 3.0])] if built.tail else []
    samples, trajectories = run_replicates(config, threads, built)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        summary = summarize(samples, seed=config.master_seed)
    summary.bound_verdicts = [(b, verify_bound(summary, b)) for b in reports]
    for s, delta, ks in tails:
        summary.tail_checks.extend(tail_check(samples, s, delta, ks))
    write_outputs(config, summary, samples, trajectories, built)
    return summary


def write_outputs(config, summary, samples, trajectories, built=None) -> None:
    out = config.outputs
    base = config.base_dir

    def target(key):
        return _resolve(out[key], base) if key in out else None

    if target("samples"):
        atomic_write(target("samples"), samples_csv(samples, config.master_seed))
    if target("trajectories"):
        if trajectories is None:
            raise ConfigError("trajectories output requested without record_trajectories")
        atomic_write(target("trajectories"), trajectories_csv(trajectories))
    if target("histogram"):
        atomic_write(target("histogram"), histogram_csv(samples))
    if target("summary"):
        doc = {
            "process": config.process,
            "params": config.params,
            "replicates": config.replicates,
            "master_seed": config.master_seed,
            "summary": summary.to_dict(),
        }
        if built is not None and built.info:
            doc["instance"] = built.info
        atomic_write(target("summary"), json.dumps(doc, indent=2, sort_keys=True) + "\n")
    if target("figure"):
        from .plotting import hitting_time_figure

        hitting_time_figure(samples, [b for b, _ in summary.bound_verdicts], target("figure"), summary)
