import json
import math
import warnings

import numpy as np
import pytest

from driftkit import bounds
from driftkit.core import BoundReport, HittingTimeSample, TheoremId
from driftkit.harness import (
    ConfigError,
    ExperimentConfig,
    Verdict,
    build_process,
    bound_from_inputs,
    default_max_steps,
    histogram_csv,
    run_experiment,
    run_replicates,
    samples_csv,
    simulate,
    summarize,
    tail_check,
    thread_count,
    verify_bound,
)
from driftkit.oracle import coupon_collector_exact
from driftkit.processes import write_dimacs, write_edge_list
from driftkit.processes.instances import gen_planted_2sat, gen_planted_cover_graph


def config(process, params, replicates=200, seed=1, **kw):
    return ExperimentConfig.from_dict(
        {"process": process, "params": params, "replicates": replicates, "master_seed": seed, **kw}
    )


def test_forced_absorption():
    samples, _ = run_replicates(config("two_barrier", {"n": 2, "x0": 1, "p": 0.5}, 50))
    assert all(s == HittingTimeSample(1, False) for s in samples)


def test_same_seed_same_csv():
    cfg = config("coupon", {"n": 30}, 300, seed=77)
    a, _ = run_replicates(cfg, threads=1)
    b, _ = run_replicates(cfg, threads=8)
    assert samples_csv(a, 77) == samples_csv(b, 77)


def test_two_barrier_mean_window():
    samples, _ = run_replicates(config("two_barrier", {"n": 20, "x0": 10, "p": 0.25}, 100_000, seed=3))
    s = summarize(samples)
    assert 196 <= s.mean <= 204


def test_split_batches_equal_full_run():
    proc = build_process("moran", {"n": 12, "r": 2.0}).process
    full, _ = simulate(proc, 400, 5, 10**6, threads=3)
    first, _ = simulate(proc, 150, 5, 10**6, threads=2)
    second, _ = simulate(proc, 250, 5, 10**6, threads=1, start_index=150)
    assert first + second == full


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("DRIFTKIT_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("DRIFTKIT_THREADS", "0")
    assert thread_count() >= 1
    monkeypatch.setenv("DRIFTKIT_THREADS", "x")
    with pytest.raises(ConfigError):
        thread_count()


# ---------------------------------------------------------------- summaries


def test_constant_samples():
    s = summarize([HittingTimeSample(4)] * 150)
    assert s.std == 0.0 and s.ci95 == (4.0, 4.0)


def test_mean_at_most_max_and_quantiles_ordered():
    rng = np.random.default_rng(0)
    for _ in range(20):
        xs = [HittingTimeSample(int(x)) for x in rng.integers(0, 100, size=rng.integers(2, 300))]
        s = summarize(xs)
        assert s.mean <= max(x.steps for x in xs)
        q = list(s.quantiles.values())
        assert q == sorted(q)


def test_coupon_mean_near_exact():
    samples, _ = run_replicates(config("coupon", {"n": 100}, 10_000, seed=11))
    s = summarize(samples)
    assert s.mean == pytest.approx(coupon_collector_exact(100), rel=0.03)


def test_bootstrap_below_hundred_and_seeded():
    xs = [HittingTimeSample(x) for x in (3, 5, 8, 1, 9, 4, 4, 7)]
    a = summarize(xs, seed=4)
    b = summarize(xs, seed=4)
    assert a.ci_method == "bootstrap" and a.ci95 == b.ci95
    assert a.ci95[0] <= a.mean <= a.ci95[1]
    assert summarize(xs, method="normal").ci_method == "normal"


def test_censored_excluded_with_warning():
    xs = [HittingTimeSample(3)] * 5 + [HittingTimeSample(10, True)]
    with pytest.warns(UserWarning, match="censored"):
        s = summarize(xs)
    assert s.n_censored == 1 and s.mean == 3.0


def test_all_censored_rejected():
    with pytest.raises(ValueError):
        summarize([HittingTimeSample(5, True)] * 3)


def test_all_censored_run_flagged():
    with pytest.warns(UserWarning, match="max_steps"):
        run_replicates(config("coupon", {"n": 50}, 5, max_steps=3))


def test_single_sample_has_no_ci():
    assert summarize([HittingTimeSample(2)]).ci95 is None


# ---------------------------------------------------------------- verdicts


def make_summary(mean, half, censored=0):
    s = summarize([HittingTimeSample(1)] * 2)
    s.mean, s.ci95, s.n_censored = mean, (mean - half, mean + half), censored
    return s


def test_verify_rules():
    up = bounds.additive_upper_report(10, 1)
    lo = bounds.additive_lower_report(10, 1, 1)
    ex = bounds.two_barrier_report(10, 5, 0.2)  # 62.5
    assert verify_bound(make_summary(9, 2), up) is Verdict.CONSISTENT
    assert verify_bound(make_summary(11, 2), up) is Verdict.CONSISTENT
    assert verify_bound(make_summary(13, 2), up) is Verdict.VIOLATED
    assert verify_bound(make_summary(11, 2), lo) is Verdict.CONSISTENT
    assert verify_bound(make_summary(7, 2), lo) is Verdict.VIOLATED
    assert verify_bound(make_summary(62, 1), ex) is Verdict.CONSISTENT
    assert verify_bound(make_summary(60, 1), ex) is Verdict.VIOLATED


def test_censoring_makes_passing_checks_inconclusive():
    up = bounds.additive_upper_report(10, 1)
    assert verify_bound(make_summary(9, 2, censored=1), up) is Verdict.INCONCLUSIVE
    assert verify_bound(make_summary(20, 2, censored=1), up) is Verdict.VIOLATED
    lo = bounds.additive_lower_report(10, 1, 1)
    assert verify_bound(make_summary(5, 1, censored=1), lo) is Verdict.INCONCLUSIVE


def test_fabricated_zero_bound_violated():
    s = summarize([HittingTimeSample(x) for x in range(1, 200)])
    assert verify_bound(s, BoundReport(TheoremId.ADDITIVE_UPPER, {}, 0.0)) is Verdict.VIOLATED


def test_coupon_and_two_barrier_consistent():
    s = summarize(run_replicates(config("coupon", {"n": 40}, 2000))[0])
    assert verify_bound(s, bounds.multiplicative_report(40, 1 / 40)) is Verdict.CONSISTENT
    s = summarize(run_replicates(config("two_barrier", {"n": 10, "x0": 3, "p": 0.25}, 20_000))[0])
    assert verify_bound(s, bounds.two_barrier_report(10, 3, 0.25)) is Verdict.CONSISTENT


def test_tail_check():
    samples, _ = run_replicates(config("coupon", {"n": 32}, 100_000, seed=2))
    rows = tail_check(samples, 32, 1 / 32, [1, 2, 3])
    assert [r["verdict"] for r in rows] == ["consistent"] * 3
    for r in rows:
        assert r["bound"] == pytest.approx(math.exp(-r["k"]))
    far = tail_check(samples, 32, 1 / 32, [50])[0]
    assert far["exceedance"] == 0.0
    zero = tail_check(samples, 32, 1 / 32, [0])[0]
    assert zero["bound"] == 1.0 and zero["verdict"] == "consistent"


def test_tail_check_detects_violation():
    xs = [HittingTimeSample(1000)] * 500
    assert tail_check(xs, 10, 1.0, [1])[0]["verdict"] == "violated"


# ---------------------------------------------------------------- config and processes


def test_unknown_config_keys_rejected():
    with pytest.raises(ConfigError, match="unknown"):
        ExperimentConfig.from_dict({"process": "coupon", "replicates": 1, "master_seed": 0, "extra": 1})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"process": "coupon", "replicates": 0, "master_seed": 0})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"process": "coupon", "replicates": 1, "master_seed": 0, "max_steps": 0})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"replicates": 1, "master_seed": 0})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(
            {"process": "coupon", "replicates": 1, "master_seed": 0, "outputs": {"plots": "x"}}
        )


def test_unknown_process_rejected():
    with pytest.raises(ConfigError):
        build_process("quicksort", {})
    with pytest.raises(ConfigError, match="missing"):
        build_process("coupon", {})


def test_default_max_steps_tracks_bound():
    built = build_process("two_barrier", {"n": 10, "x0": 5, "p": 0.5})
    assert default_max_steps(built) == 2500
    built = build_process("moran", {"n": 10, "r": 2.0, "start": 5})
    assert default_max_steps(built) == 10_000_000


def test_every_named_process_runs(tmp_path):
    g, _ = gen_planted_cover_graph(10, 3, 0.5, seed=1)
    write_edge_list(tmp_path / "g.txt", g)
    f, a = gen_planted_2sat(6, 10, seed=1)
    write_dimacs(tmp_path / "f.cnf", f, a)
    cases = [
        ("two_barrier", {"n": 6, "x0": 2, "p": 0.25}),
        ("one_barrier", {"n": 6, "p": 0.25}),
        ("gamblers_ruin", {"coins": 4}),
        ("coupon", {"n": 10}),
        ("coupon_per_kind", {"n": 10, "p": 0.1}),
        ("inversion_sort", {"n": 8}),
        ("inversion_sort", {"n": 8, "instance": "adjacent_swapped"}),
        ("inversion_sort", {"n": 6, "instance": "reversed"}),
        ("inversion_sort", {"entries": [3, 1, 2]}),
        ("vertex_cover", {"graph": "g.txt"}),
        ("vertex_cover", {"n": 10, "cover_size": 3, "edge_prob": 0.5, "seed": 2}),
        ("moran", {"n": 8, "r": 2.0}),
        ("moran", {"n": 8, "r": 1.0}),
        ("recolour", {"n": 12, "edge_prob": 0.4, "seed": 3}),
        ("two_sat", {"formula": "f.cnf"}),
        ("two_sat", {"n_vars": 6, "n_clauses": 12, "seed": 3}),
    ]
    for name, params in cases:
        cfg = ExperimentConfig.from_dict(
            {"process": name, "params": params, "replicates": 30, "master_seed": 4}, base_dir=tmp_path
        )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            summary = run_experiment(cfg)
        assert summary.n_censored == 0, name
        assert not summary.violated, name


def test_bound_from_inputs():
    assert bound_from_inputs("two_barrier", {"n": 10, "x0": 5, "p": 0.5}).bound == 25.0
    r = bound_from_inputs("variable", {"x0_mean": 10, "coef": 1, "exponent": 2})
    assert r.bound == pytest.approx(1.9)
    with pytest.raises(ValueError):
        bound_from_inputs("additive_lower", {"x0_mean": 1, "delta": 1})
    with pytest.raises(ValueError):
        bound_from_inputs("moran_potential", {"n": 5})
    with pytest.raises(ValueError):
        bound_from_inputs("nonsense", {})


def test_outputs_written(tmp_path):
    cfg = ExperimentConfig.from_dict(
        {
            "process": "two_barrier",
            "params": {"n": 8, "x0": 4, "p": 0.5},
            "replicates": 120,
            "master_seed": 9,
            "record_trajectories": True,
            "bounds": ["two_barrier", {"theorem": "martingale_upper", "inputs": {"a": 0, "b": 8, "x0_mean": 4, "delta_var": 1}}],
            "outputs": {"samples": "s.csv", "trajectories": "t.csv", "summary": "r.json", "histogram": "h.csv", "figure": "h.png"},
        },
        base_dir=tmp_path,
    )
    summary = run_experiment(cfg)
    assert len(summary.bound_verdicts) == 2
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0] == "replicate_index,seed,steps,censored" and len(lines) == 121
    assert (tmp_path / "t.csv").read_text().startswith("replicate_index,t,potential\n")
    doc = json.loads((tmp_path / "r.json").read_text())
    assert doc["summary"]["n_replicates"] == 120
    hist = (tmp_path / "h.csv").read_text().splitlines()
    assert hist[0] == "bin_lo,bin_hi,count"
    assert sum(int(r.split(",")[2]) for r in hist[1:]) == 120
    assert (tmp_path / "h.png").read_bytes()[:4] == b"\x89PNG"
    assert not list(tmp_path.glob(".*.tmp"))


def test_trajectories_need_recording(tmp_path):
    with pytest.raises(ConfigError, match="record_trajectories"):
        ExperimentConfig.from_dict(
            {"process": "coupon", "params": {"n": 5}, "replicates": 3, "master_seed": 0,
             "outputs": {"trajectories": "t.csv", "samples": "s.csv"}},
            base_dir=tmp_path,
        )
    assert not list(tmp_path.iterdir())


def test_histogram_empty_when_all_censored():
    assert histogram_csv([HittingTimeSample(3, True)]) == "bin_lo,bin_hi,count\n"


def test_bad_bound_entry_rejected():
    cfg = config("coupon", {"n": 5}, 5, bounds=["moran_neutral"])
    with pytest.raises(ConfigError, match="available"):
        run_experiment(cfg)
