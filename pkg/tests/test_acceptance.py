"""Acceptance suite: one test per criterion.

Each test is marked with its criterion number; the pass/fail lines are
printed in the terminal summary by ``conftest.py``.  Seeds are fixed in
advance as ``MASTER + criterion number``.  Run on its own with::

    pytest tests/test_acceptance.py
"""
import json
import math
import warnings
from math import comb

import numpy as np
import pytest

from driftkit import bounds
from driftkit.estimator import (
    Regime,
    classify_regime,
    estimate_drift,
    fit_additive,
    predict_hitting_time,
)
from driftkit.harness import (
    ExperimentConfig,
    Verdict,
    build_process,
    default_max_steps,
    run_experiment,
    simulate,
    summarize,
    tail_check,
    verify_bound,
)
from driftkit.oracle import (
    BirthDeathChain,
    birth_death_absorption_time,
    brute_force_min_vertex_cover,
    coupon_collector_exact,
    dense_absorption_times,
    two_sat_dense_chain,
)
from driftkit.processes import barrier_process, coupon_process, moran_process, two_sat_process
from driftkit.processes.instances import gen_planted_2sat, gen_planted_cover_graph

MASTER = 20261015


@pytest.fixture(autouse=True)
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield


def mc(name, params, reps, seed, max_steps=None, record=False):
    built = build_process(name, params)
    if max_steps is None:
        max_steps = default_max_steps(built)
    samples, trajs = simulate(built.process, reps, seed, max_steps, record=record)
    return built, samples, summarize(samples, seed=seed), trajs


def detail(record_property, text):
    record_property("detail", text)


@pytest.mark.criterion(1, "two-barrier exactness")
def test_c01_two_barrier(record_property):
    worst_rel, misses, cases = 0.0, [], 0
    for n in (10, 20, 40):
        for x0 in (n // 4, n // 2):
            for p in (1 / 8, 1 / 4, 1 / 2):
                exact = x0 * (n - x0) / (2 * p)
                oracle = birth_death_absorption_time(BirthDeathChain.two_barrier(n, p), x0)
                worst_rel = max(worst_rel, abs(oracle - exact) / exact)
                _, _, s, _ = mc("two_barrier", {"n": n, "x0": x0, "p": p}, 100_000, MASTER + 1 + cases)
                if not s.ci95[0] <= exact <= s.ci95[1]:
                    misses.append((n, x0, p, round(s.mean, 2), exact))
                cases += 1
    detail(record_property, f"{cases} cases, oracle rel err {worst_rel:.1e}, CI misses {misses}")
    assert worst_rel <= 1e-9
    assert not misses


@pytest.mark.criterion(2, "one-barrier exactness")
def test_c02_one_barrier(record_property):
    worst = 0.0
    for n in range(1, 65):
        for p in (1 / 8, 1 / 4, 1 / 2):
            oracle = birth_death_absorption_time(BirthDeathChain.one_barrier(n, p), 0)
            worst = max(worst, abs(oracle - n * n / (2 * p)) / (n * n / (2 * p)))
    verdicts = []
    for i, p in enumerate((1 / 8, 1 / 4, 1 / 2)):
        built, _, s, _ = mc("one_barrier", {"n": 16, "p": p}, 100_000, MASTER + 2 + 100 * i)
        verdicts.append(verify_bound(s, built.bounds["one_barrier"]))
    detail(record_property, f"oracle rel err {worst:.1e}, n=16 verdicts {[v.value for v in verdicts]}")
    assert worst <= 1e-9
    assert all(v is Verdict.CONSISTENT for v in verdicts)


@pytest.mark.criterion(3, "gambler's ruin mean within 2% of n^2")
def test_c03_gamblers_ruin(record_property):
    rel = {}
    for n in (8, 16, 32):
        _, _, s, _ = mc("gamblers_ruin", {"coins": n}, 100_000, MASTER + 3 + n)
        rel[n] = s.mean / n**2 - 1
    detail(record_property, ", ".join(f"n={n}: {r:+.2%}" for n, r in rel.items()))
    assert all(abs(r) <= 0.02 for r in rel.values())


@pytest.mark.criterion(4, "coupon collector mean and tail")
def test_c04_coupon(record_property):
    n = 100
    built, samples, s, _ = mc("coupon", {"n": n}, 10_000, MASTER + 4)
    exact = coupon_collector_exact(n)
    upper = n * (1 + math.log(n))
    tails = tail_check(samples, n, 1 / n, [1, 2, 3])
    detail(
        record_property,
        f"mean {s.mean:.1f} vs exact {exact:.1f} ({s.mean / exact - 1:+.2%}), bound {upper:.1f}, "
        f"tails {[(t['k'], round(t['exceedance'], 4), t['verdict']) for t in tails]}",
    )
    assert abs(s.mean / exact - 1) <= 0.03
    assert s.mean <= upper
    assert verify_bound(s, built.bounds["multiplicative"]) is Verdict.CONSISTENT
    assert all(t["verdict"] == "consistent" for t in tails)


@pytest.mark.criterion(5, "generalized coupon collector")
def test_c05_coupon_per_kind(record_property):
    n, p = 50, 0.02
    built, samples, s, _ = mc("coupon_per_kind", {"n": n, "p": p}, 10_000, MASTER + 5)
    bound = (1 + math.log(n)) / p
    tails = tail_check(samples, n, p, [1, 2, 3])
    detail(record_property, f"mean {s.mean:.1f} vs bound {bound:.1f}, tails {[t['verdict'] for t in tails]}")
    assert s.mean <= bound
    assert built.bounds["multiplicative"].bound == pytest.approx(bound)
    assert verify_bound(s, built.bounds["multiplicative"]) is Verdict.CONSISTENT
    assert all(t["verdict"] == "consistent" for t in tails)


@pytest.mark.criterion(6, "vertex cover 2-approximation")
def test_c06_vertex_cover(record_property):
    verdicts, ratios = [], []
    for g in range(200):
        params = {"n": 12 + g % 9, "cover_size": 3 + g % 5, "edge_prob": 0.4, "seed": MASTER + g}
        built = build_process("vertex_cover", params)
        graph, _ = gen_planted_cover_graph(params["n"], params["cover_size"], params["edge_prob"], params["seed"])
        opt = brute_force_min_vertex_cover(graph.n, graph.edges)
        assert opt == built.info["opt"]
        samples, _ = simulate(built.process, 200, MASTER + 6 + g, 10_000)
        s = summarize(samples, seed=g)
        verdicts.append(verify_bound(s, bounds.additive_upper_report(opt, 0.5)))
        if opt:
            ratios.append(s.mean / opt)
    bad = sum(v is not Verdict.CONSISTENT for v in verdicts)
    detail(record_property, f"200 graphs, worst mean/OPT {max(ratios):.3f}, non-consistent {bad}")
    assert bad == 0


@pytest.mark.criterion(7, "inversion sort upper bound and growth")
def test_c07_inversion_sort(record_property):
    pairs = comb(16, 2)
    upper = pairs * (1 + math.log(pairs))
    _, _, s, _ = mc("inversion_sort", {"n": 16}, 1000, MASTER + 7)
    verdict = verify_bound(s, bounds.multiplicative_report(pairs, 1 / pairs))
    ns = np.array([8, 16, 32, 64])
    means = [mc("inversion_sort", {"n": int(n), "instance": "adjacent_swapped"}, 1000, MASTER + 7 + int(n))[2].mean
             for n in ns]
    slope = np.polyfit(np.log(ns**2 * np.log(ns)), np.log(means), 1)[0]
    detail(record_property, f"random n=16 mean {s.mean:.1f} vs {upper:.1f} ({verdict.value}), slope {slope:.3f}")
    assert s.mean <= upper and verdict is Verdict.CONSISTENT
    assert 0.8 <= slope <= 1.2


@pytest.mark.criterion(8, "Moran r != 1 potential bound")
def test_c08_moran_potential(record_property):
    checked = 0
    for r in (0.25, 0.5, 2.0, 4.0):
        for n in range(2, 51):
            b = bounds.moran_potential_bound(n, r)
            chain = BirthDeathChain.moran(n, r)
            t = birth_death_absorption_time(chain, n - 1)
            # for r < 1 the bound is tight, so allow rounding
            assert b >= t * (1 - 1e-12), (n, r, b, t)
            checked += 1
    shapes = {}
    for r in (0.25, 0.5, 2.0, 4.0):
        ratio = [bounds.moran_potential_bound(n, r) / (n * math.log(n)) for n in range(8, 513)]
        assert all(b <= a * (1 + 1e-12) for a, b in zip(ratio, ratio[1:])), r
        assert max(ratio) <= ratio[0] * (1 + 1e-12)
        shapes[r] = (round(ratio[0], 3), round(ratio[-1], 3))
    detail(record_property, f"{checked} (n, r) pairs dominate the oracle; ratio n=8 -> 512: {shapes}")


@pytest.mark.criterion(9, "neutral Moran from n-1")
def test_c09_moran_neutral(record_property):
    worst = 0.0
    for n in range(2, 101):
        t = birth_death_absorption_time(BirthDeathChain.moran(n, 1.0), n - 1)
        assert t <= n * n / 2
        worst = max(worst, t / (n * n / 2))
    built, _, s, _ = mc("moran", {"n": 16, "r": 1.0}, 10_000, MASTER + 9)
    verdict = verify_bound(s, built.bounds["moran_neutral"])
    detail(record_property, f"max oracle/(n^2/2) {worst:.3f}; n=16 mean {s.mean:.1f} vs 128 ({verdict.value})")
    assert built.bounds["moran_neutral"].bound == 128.0
    assert verdict is Verdict.CONSISTENT


@pytest.mark.criterion(10, "RECOLOUR on planted 3-colourable graphs")
def test_c10_recolour(record_property):
    n = 24
    bound = bounds.martingale_report(0, n, n / 2, 2 / 3)
    assert bound.bound == pytest.approx(3 * n * n / 8)
    censored, verdicts, means = 0, [], []
    for g in range(100):
        built, samples, s, _ = mc("recolour", {"n": n, "edge_prob": 0.3, "seed": MASTER + g}, 100, MASTER + 10 + g)
        censored += s.n_censored
        verdicts.append(verify_bound(s, bound))
        means.append(s.mean)
    bad = sum(v is not Verdict.CONSISTENT for v in verdicts)
    detail(record_property, f"censored {censored}, max mean {max(means):.1f} vs {bound.bound:.0f}, non-consistent {bad}")
    assert censored == 0 and bad == 0
    assert max(means) <= bound.bound


@pytest.mark.criterion(11, "random 2-SAT")
def test_c11_two_sat(record_property):
    n = 20
    verdicts, means, censored = [], [], 0
    for i in range(100):
        built, _, s, _ = mc("two_sat", {"n_vars": n, "n_clauses": 60, "seed": MASTER + i}, 100, MASTER + 11 + i)
        assert built.bounds["martingale_upper"].bound == n * n
        censored += s.n_censored
        verdicts.append(verify_bound(s, built.bounds["martingale_upper"]))
        means.append(s.mean)
    bad = sum(v is not Verdict.CONSISTENT for v in verdicts)
    small = []
    for nv, nc in ((2, 3), (3, 5)):
        formula, planted = gen_planted_2sat(nv, nc, MASTER + nv)
        times = dense_absorption_times(two_sat_dense_chain(nv, formula.clauses))
        exact = sum(times.values()) / len(times)
        samples, _ = simulate(two_sat_process(formula, planted), 10_000, MASTER + 11 + nv, 10_000)
        s = summarize(samples, seed=nv)
        small.append((nv, round(exact, 4), round(s.ci95[0], 4), round(s.ci95[1], 4)))
    inside = [lo <= e <= hi for _, e, lo, hi in small]
    detail(record_property, f"max mean {max(means):.1f} vs {n * n}, non-consistent {bad}; exact vs CI {small}")
    assert censored == 0 and bad == 0 and max(means) <= n * n
    assert all(inside)


@pytest.mark.criterion(12, "drift estimator calibration")
def test_c12_estimator(record_property):
    notes = []
    # two-barrier, zero drift, variance 2p
    n, x0, p = 20, 10, 0.25
    _, trajs = simulate(barrier_process(n, x0, p), 5500, MASTER + 12, 10**6, record=True)
    est = estimate_drift(trajs)
    fit = classify_regime(est)
    assert est.total >= 10**6
    assert fit.regime is Regime.ZERO_DRIFT
    v_rel = fit.delta_var / (2 * p) - 1
    pred = predict_hitting_time(fit, x0, bounds.IntervalParameters(0, n, x0, fit.delta_var)).bound
    exact = birth_death_absorption_time(BirthDeathChain.two_barrier(n, p), x0)
    notes.append(f"two-barrier {fit.regime.value} v {fit.delta_var:.4f} ({v_rel:+.2%}) pred {pred:.0f}>={exact:.0f}")
    assert abs(v_rel) <= 0.05 and pred >= exact

    # coupon collector, multiplicative
    n = 50
    _, trajs = simulate(coupon_process(n), 1000, MASTER + 112, 10**6, record=True)
    fit = classify_regime(estimate_drift(trajs))
    assert fit.regime is Regime.MULTIPLICATIVE
    pred = predict_hitting_time(fit, n).bound
    exact = coupon_collector_exact(n)
    notes.append(f"coupon {fit.regime.value} pred {pred:.0f}>={exact:.0f}")
    assert pred >= exact

    # Moran r = 2: not zero drift; its bound comes from the additive fit
    n, r = 16, 2.0
    _, trajs = simulate(moran_process(n, r), 3000, MASTER + 212, 10**6, record=True)
    est = estimate_drift(trajs)
    fit = classify_regime(est)
    assert fit.regime is not Regime.ZERO_DRIFT
    pred = predict_hitting_time(fit_additive(est), n - 1).bound
    exact = birth_death_absorption_time(BirthDeathChain.moran(n, r), n - 1)
    notes.append(f"moran {fit.regime.value} pred {pred:.0f}>={exact:.0f}")
    detail(record_property, "; ".join(notes))
    assert pred >= exact


VERIFY_CONFIGS = [
    {"process": "two_barrier", "params": {"n": 16, "x0": 5, "p": 0.25}, "replicates": 3000},
    {"process": "coupon", "params": {"n": 60}, "replicates": 2000},
    {"process": "two_sat", "params": {"n_vars": 12, "n_clauses": 30, "seed": 3}, "replicates": 500},
    {"process": "moran", "params": {"n": 10, "r": 1.0}, "replicates": 2000, "record_trajectories": True},
]
OUTPUTS = {"samples": "s.csv", "summary": "r.json", "histogram": "h.csv", "figure": "h.png"}


@pytest.mark.criterion(13, "determinism across runs and thread counts")
def test_c13_determinism(record_property, tmp_path):
    compared = 0
    for i, doc in enumerate(VERIFY_CONFIGS):
        outputs = dict(OUTPUTS, **({"trajectories": "t.csv"} if doc.get("record_trajectories") else {}))
        blobs = []
        for run_no, threads in enumerate((1, 8, 1, 8)):
            d = tmp_path / f"c{i}_{run_no}"
            d.mkdir()
            (d / "cfg.json").write_text(json.dumps({**doc, "master_seed": MASTER + 13, "outputs": outputs}))
            run_experiment(ExperimentConfig.load(d / "cfg.json"), threads=threads)
            blobs.append({k: (d / v).read_bytes() for k, v in outputs.items()})
        assert all(b == blobs[0] for b in blobs[1:]), doc["process"]
        compared += len(outputs)
    detail(record_property, f"{len(VERIFY_CONFIGS)} configs x 4 runs (threads 1, 8), {compared} files byte-identical")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
