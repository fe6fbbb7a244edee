"""Command-line entry point.

JSON goes to stdout; bulk data (samples, trajectories, histograms, instance
files) goes to files written via a temporary file and a rename.  Exit codes:
0 success, 1 usage or input error, 2 when a verdict is ``violated``.

Examples
--------
::

    $ driftkit bound two_barrier --n 10 --x0 5 --p 0.5
    {"bound": 25.0, "direction": "exact", ...}
    $ driftkit oracle coupon_exact --n 2
    {"kind": "coupon_exact", "value": 3.0, ...}
    $ driftkit verify --config moran_neutral_n10.json      # exit 0
    $ driftkit simulate --config c.json --plot-data hist.csv --figure hist.png
    $ driftkit estimate --trajectories t.csv --x0 10 --interval 0 20
    $ driftkit gen planted_2sat --n-vars 20 --n-clauses 60 --seed 7 --out f.cnf
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

from . import harness
from .bounds import IntervalParameters
from .core import TheoremId
from .estimator import FitRejected, classify_regime, estimate_drift, predict_hitting_time, read_trajectory_csv

EXIT_OK, EXIT_USAGE, EXIT_VIOLATED = 0, 1, 2

ORACLE_KINDS = ("two_barrier", "one_barrier", "moran", "coupon_exact", "min_vertex_cover", "two_sat")
GEN_KINDS = ("planted_3colorable", "planted_2sat", "planted_cover", "random_permutation", "adjacent_swapped")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; 2 is reserved for violations here
    def error(self, message):
        raise UsageError(message)


def _dump(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True, default=_default))


def _default(o):
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    if hasattr(o, "value"):
        return o.value
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _clean(obj):
    """Replace non-finite floats, which strict JSON cannot hold."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


# ------------------------------------------------------------------ bound

_BOUND_FLAGS = {
    "n": int,
    "x0": float,
    "x0_mean": float,
    "p": float,
    "r": float,
    "a": float,
    "b": float,
    "delta": float,
    "delta_var": float,
    "step_bound": float,
    "s": float,
    "k": float,
    "start": int,
    "coef": float,
    "exponent": float,
    "tol": float,
}


def _cmd_bound(args) -> int:
    inputs = {k: getattr(args, k) for k in _BOUND_FLAGS if getattr(args, k) is not None}
    if "x0" in inputs and "x0_mean" not in inputs:
        inputs["x0_mean"] = inputs["x0"]
    report = harness.bound_from_inputs(args.theorem, inputs)
    _dump(report.to_dict())
    return EXIT_OK


# ------------------------------------------------------------------ simulate / verify


def _load_config(args) -> harness.ExperimentConfig:
    cfg = harness.ExperimentConfig.load(args.config)
    outputs = dict(cfg.outputs)
    if getattr(args, "plot_data", None):
        outputs["histogram"] = str(Path(args.plot_data).resolve())
    if getattr(args, "figure", None):
        outputs["figure"] = str(Path(args.figure).resolve())
    if getattr(args, "samples", None):
        outputs["samples"] = str(Path(args.samples).resolve())
    cfg.outputs = outputs
    return cfg


def _cmd_simulate(args) -> int:
    cfg = _load_config(args)
    summary = harness.run_experiment(cfg, verify=False)
    _dump(_clean(summary.to_dict()))
    return EXIT_OK


def _cmd_verify(args) -> int:
    cfg = _load_config(args)
    summary = harness.run_experiment(cfg, verify=True)
    _dump(_clean(summary.to_dict()))
    return EXIT_VIOLATED if summary.violated else EXIT_OK


# ------------------------------------------------------------------ estimate


def _cmd_estimate(args) -> int:
    trajectories = read_trajectory_csv(args.trajectories)
    binning = args.binning
    if binning not in ("exact_integer", "auto"):
        try:
            binning = float(binning)
        except ValueError:
            raise UsageError(f"--binning must be exact_integer, auto or a width, got {args.binning!r}") from None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        est = estimate_drift(trajectories, binning)
        fit = classify_regime(est, args.min_count)
    out = {
        "estimate": {"binning": est.binning, "width": est.width, "transitions": est.total, "bins": est.table()},
        "fit": fit.to_dict(),
        "warnings": [str(w.message) for w in caught],
    }
    if args.x0 is not None:
        interval = None
        if args.interval:
            if fit.delta_var is None:
                interval = None
            else:
                a, b = args.interval
                interval = IntervalParameters(a, b, args.x0, fit.delta_var)
        try:
            out["prediction"] = predict_hitting_time(fit, args.x0, interval).to_dict()
        except (ValueError, FitRejected) as exc:
            out["prediction_error"] = str(exc)
    if args.figure:
        from .plotting import drift_figure

        drift_figure(est, args.figure)
    _dump(_clean(out))
    return EXIT_OK


# ------------------------------------------------------------------ oracle


def _cmd_oracle(args) -> int:
    from . import oracle

    kind = args.kind
    out = {"kind": kind}
    if kind in ("two_barrier", "one_barrier", "moran"):
        if args.n is None:
            raise UsageError(f"oracle {kind} needs --n")
        if kind == "moran":
            if args.r is None:
                raise UsageError("oracle moran needs --r")
            chain = oracle.BirthDeathChain.moran(args.n, args.r)
            start = args.n - 1 if args.start is None else args.start
        else:
            if args.p is None:
                raise UsageError(f"oracle {kind} needs --p")
            chain = getattr(oracle.BirthDeathChain, kind)(args.n, args.p)
            start = args.x0 if args.x0 is not None else (0 if kind == "one_barrier" else args.n // 2)
        out.update(n=args.n, start=start, value=oracle.birth_death_absorption_time(chain, start))
    elif kind == "coupon_exact":
        if args.n is None:
            raise UsageError("oracle coupon_exact needs --n")
        out.update(n=args.n, value=oracle.coupon_collector_exact(args.n))
    elif kind == "min_vertex_cover":
        if not args.graph:
            raise UsageError("oracle min_vertex_cover needs --graph")
        from .processes import read_edge_list

        g = read_edge_list(args.graph)
        cover = oracle.min_vertex_cover(g.n, g.edges)
        out.update(value=len(cover), cover=sorted(cover))
    elif kind == "two_sat":
        if not args.formula:
            raise UsageError("oracle two_sat needs --formula")
        from .processes import read_dimacs

        formula, _ = read_dimacs(args.formula)
        times = oracle.dense_absorption_times(oracle.two_sat_dense_chain(formula.n_vars, formula.clauses))
        # the algorithm starts from a uniformly random assignment
        out.update(n_vars=formula.n_vars, value=sum(times.values()) / len(times))
    _dump(out)
    return EXIT_OK


# ------------------------------------------------------------------ gen


def _require(args, *names):
    missing = ["--" + n.replace("_", "-") for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"gen {args.kind} needs {' '.join(missing)}")


def _cmd_gen(args) -> int:
    from .processes import instances as inst

    kind, out = args.kind, Path(args.out)
    written = [str(out)]
    if kind == "planted_3colorable":
        _require(args, "n", "edge_prob", "seed")
        graph, chi = inst.gen_planted_3colorable(args.n, args.edge_prob, args.seed)
        inst.write_edge_list(out, graph)
        coloring = Path(args.coloring_out) if args.coloring_out else out.with_suffix(".coloring")
        inst.atomic_write(coloring, inst.format_coloring(chi))
        written.append(str(coloring))
        info = {"vertices": graph.n, "edges": len(graph.edges)}
    elif kind == "planted_2sat":
        _require(args, "n_vars", "n_clauses", "seed")
        formula, planted = inst.gen_planted_2sat(args.n_vars, args.n_clauses, args.seed)
        inst.write_dimacs(out, formula, planted)
        info = {"n_vars": formula.n_vars, "clauses": len(formula.clauses)}
    elif kind == "planted_cover":
        _require(args, "n", "cover_size", "edge_prob", "seed")
        graph, cover = inst.gen_planted_cover_graph(args.n, args.cover_size, args.edge_prob, args.seed)
        inst.write_edge_list(out, graph)
        info = {"vertices": graph.n, "edges": len(graph.edges), "planted_cover": sorted(cover)}
    elif kind == "random_permutation":
        _require(args, "n", "seed")
        perm = inst.random_permutation(args.n, args.seed)
        inst.atomic_write(out, json.dumps(list(perm)) + "\n")
        info = {"n": args.n}
    else:
        _require(args, "n")
        from .processes import gen_adjacent_swapped

        state = gen_adjacent_swapped(args.n)
        inst.atomic_write(out, json.dumps(list(state.entries)) + "\n")
        info = {"n": args.n, "inversions": state.inversions}
    _dump({"kind": kind, "written": written, **info})
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="driftkit", description="Drift-theorem bounds, simulations and checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bound", help="evaluate a theorem bound", description="Print a bound report as JSON.")
    p.add_argument("theorem", choices=[t.value for t in TheoremId])
    for name, typ in _BOUND_FLAGS.items():
        p.add_argument("--" + name.replace("_", "-"), dest=name, type=typ)
    p.set_defaults(func=_cmd_bound)

    for name, func, text in (
        ("simulate", _cmd_simulate, "run replicates and print a summary"),
        ("verify", _cmd_verify, "run replicates and check the configured bounds (exit 2 if violated)"),
    ):
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--plot-data", help="histogram CSV (bin_lo, bin_hi, count)")
        p.add_argument("--figure", help="histogram image (format from the suffix, e.g. .png)")
        p.add_argument("--samples", help="per-replicate CSV (overrides the config)")
        p.set_defaults(func=func)

    p = sub.add_parser("estimate", help="estimate drift from trajectories", description="Drift table and regime fit.")
    p.add_argument("--trajectories", required=True, help="CSV with replicate_index,t,potential")
    p.add_argument("--binning", default="exact_integer", help="exact_integer, auto or a bin width")
    p.add_argument("--min-count", type=int, default=30, help="transitions a bin needs to be used")
    p.add_argument("--x0", type=float, help="start value for a predicted hitting-time bound")
    p.add_argument("--interval", type=float, nargs=2, metavar=("A", "B"), help="interval for zero-drift predictions")
    p.add_argument("--figure", help="drift plot image")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("oracle", help="exact expected hitting times", description="Exact values from linear solves.")
    p.add_argument("kind", choices=ORACLE_KINDS)
    p.add_argument("--n", type=int)
    p.add_argument("--x0", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--start", type=int)
    p.add_argument("--graph", help="edge-list file")
    p.add_argument("--formula", help="DIMACS 2-CNF file")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("gen", help="write instance files", description="Generate planted instances.")
    p.add_argument("kind", choices=GEN_KINDS)
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--n-vars", dest="n_vars", type=int)
    p.add_argument("--n-clauses", dest="n_clauses", type=int)
    p.add_argument("--cover-size", dest="cover_size", type=int)
    p.add_argument("--edge-prob", dest="edge_prob", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--coloring-out", dest="coloring_out", help="colouring file (default: OUT with .coloring)")
    p.set_defaults(func=_cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (UsageError, ValueError, OSError) as exc:
        print(f"driftkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
