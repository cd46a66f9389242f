"""Acceptance gate: one PASS/FAIL line per criterion at its stated tolerance.

Run alone with ``pytest tests/test_acceptance.py -v -s`` or as part of the
full suite; the lines are written straight to the terminal either way.
"""

import math
import statistics
import time

import numpy as np
import pytest

from conftest import random_graph
from distcolor.coloring import chromatic_bruteforce, dsatur, exact_chromatic
from distcolor.experiments import TrialConfig, lemma4_violations, run_experiment, run_trial, trial_seed
from distcolor.geometry import RadiusSchedule, radius_for, sample_points
from distcolor.graph import build_graph, build_graph_bruteforce, graph_power
from distcolor.theory import c_ratio_indicator, h_function, h_inverse_upper, xi_indicator

pytestmark = pytest.mark.acceptance

BASE_SEED = 2024


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}", flush=True)
        assert ok, detail

    return emit


def _medians(rep, key):
    return [agg[key] for agg in rep.aggregates]


def test_c01_exact_matches_bruteforce(report):
    rng = np.random.default_rng(BASE_SEED)
    start = time.perf_counter()
    agree = 0
    for _ in range(200):
        n = int(rng.integers(1, 10))
        g = random_graph(rng, n, float(rng.uniform(0.1, 0.9)))
        est = exact_chromatic(g)
        agree += est.exact and est.upper == chromatic_bruteforce(g)
    elapsed = time.perf_counter() - start
    report(1, agree == 200 and elapsed < 60, f"{agree}/200 agree in {elapsed:.1f}s (< 60s)")


def test_c02_cell_grid_matches_bruteforce(report):
    rng = np.random.default_rng(BASE_SEED)
    equal = 0
    for k in range(50):
        d = int(rng.integers(1, 4))
        p = [1.0, 2.0, math.inf][int(rng.integers(0, 3))]
        r = radius_for(RadiusSchedule("conn", 2.0), 300, d)
        cloud = sample_points(300, "uniform-cube", d, seed=k, r=r, p=p)
        equal += build_graph(cloud) == build_graph_bruteforce(cloud)
    report(2, equal == 50, f"{equal}/50 clouds with identical adjacency")


def test_c03_deterministic_sandwich(report):
    sched = RadiusSchedule("conn", 2.0)
    ok = exact = contained = 0
    for k in range(100):
        l = 2 + k % 2
        cfg = TrialConfig(n=40, d=2, l=l, schedule=sched, seed=trial_seed(BASE_SEED, l, k),
                          method="exact")
        rec = run_trial(cfg)
        exact += rec.exact
        ok += rec.chi_hi <= rec.chil_hi <= rec.chip_hi
        cloud = sample_points(40, cfg.density, 2, cfg.seed, r=rec.r)
        g = build_graph(cloud)
        contained += graph_power(g, l).is_subgraph_of(build_graph(cloud.with_radius(l * rec.r)))
    report(3, ok == exact == contained == 100,
           f"sandwich {ok}/100, exact {exact}/100, G^l inside G' {contained}/100")


def test_c04_lemma4_base_case(report):
    rep = run_experiment("conn", [500, 2000, 8000], 10, BASE_SEED, l=1, colorings=False)
    counts = [rec.viol for rec in rep.records]
    extra = [lemma4_violations(c, build_graph(c), 1)
             for c in (sample_points(1000, "gaussian", d, s, r=0.2) for d in (1, 2, 3) for s in range(3))]
    total = sum(counts) + sum(extra)
    report(4, total == 0, f"{len(counts) + len(extra)} clouds, total l=1 violations {total}")


@pytest.mark.slow
def test_c05_lemma4_trend(report):
    start = time.perf_counter()
    rep = run_experiment("lemma4", [2500, 10000, 40000], 20, BASE_SEED)
    elapsed = time.perf_counter() - start
    zero = _medians(rep, "viol_zero_fraction")
    mean = _medians(rep, "viol_mean")
    ok = all(b >= a for a, b in zip(zero, zero[1:])) and zero[-1] == 1 and elapsed < 600
    report(5, ok, f"zero-violation fractions {zero}, mean violations "
                  f"{[round(m) for m in mean]}, {elapsed:.0f}s (< 600s)")


@pytest.mark.slow
def test_c06_sub_regime_trend(report):
    rep = run_experiment("sub", [2000, 8000, 32000], 15, BASE_SEED)
    med = _medians(rep, "ratio_median")
    clique_ok = all(rec.omega <= rec.chi_lo <= rec.chi_hi for rec in rep.records)
    ok = all(b <= a for a, b in zip(med, med[1:])) and med[-1] < med[0] and clique_ok
    report(6, ok, f"median chi_l/chi {[round(m, 4) for m in med]} "
                  f"(need nonincreasing, last < first); omega cross-check {clique_ok}")


@pytest.mark.slow
def test_c07_super_regime_trend(report):
    rep = run_experiment("super", [2000, 8000, 32000], 15, BASE_SEED)
    med = _medians(rep, "norm_ratio_median")
    inside = sum(1 / 4 <= rec.norm_ratio <= rec.chip_hi / (4 * rec.chi_hi) for rec in rep.records)
    ok = all(b >= a for a, b in zip(med, med[1:])) and inside == len(rep.records)
    report(7, ok, f"median chi_l/(4 chi) {[round(m, 4) for m in med]} (need nondecreasing); "
                  f"{inside}/{len(rep.records)} trials inside [1/4, chi'/(4 chi)]")


@pytest.mark.slow
def test_c08_focusing(report):
    start = time.perf_counter()
    rep = run_experiment("focusing", [50000], 200, BASE_SEED)
    elapsed = time.perf_counter() - start
    agg = rep.aggregates[0]
    values = [rec.chil_hi for rec in rep.records]
    hist = {v: values.count(v) for v in sorted(set(values))}
    certified = sum(rec.chil_lo == rec.chil_hi for rec in rep.records)
    # largest mass any window could hold whatever the true values inside open brackets
    ceiling = max(sum(rec.chil_lo <= a + 1 and rec.chil_hi >= a for rec in rep.records)
                  for a in range(min(values) - 1, max(values) + 1)) / len(values)
    ok = agg["focus_mass"] >= 0.8 and elapsed < 900
    report(8, ok, f"chi_l window {{{agg['focus_a']}, {agg['focus_a'] + 1}}} holds mass "
                  f"{agg['focus_mass']:.3f} (>= 0.8), histogram {hist}, "
                  f"{certified}/200 brackets closed, bracket-consistent ceiling {ceiling:.3f}, "
                  f"{elapsed:.0f}s (< 900s)")


def test_c09_theory_functionals(report):
    ys = np.geomspace(1.0, 1e6, 61)
    round_trip = max(abs(h_inverse_upper(h_function(y)) - y) for y in ys)
    xi = xi_indicator(1, 1, 1)
    grid = np.geomspace(1e-3, 1e3, 20)
    sandwich = sum(
        (t / (t + h)) * xi_indicator(1, t, 1) <= xi_indicator(1, t + h, 1) <= xi_indicator(1, t, 1)
        for t in grid for h in grid
    )
    ratios_ok = True
    for l, d in ((2, 1), (2, 2), (3, 2), (2, 3)):
        cs = [c_ratio_indicator(l, d, t) for t in np.geomspace(1e-4, 1e6, 60)]
        ratios_ok &= all(l**-d <= c <= 1 for c in cs)
        ratios_ok &= all(b >= a for a, b in zip(cs, cs[1:])) and abs(cs[-1] - 1) < 1e-3
    ok = round_trip <= 1e-10 and abs(xi - math.e) <= 1e-9 and sandwich == 400 and ratios_ok
    report(9, ok, f"H^-1(H(y)) max error {round_trip:.3g} (<= 1e-10), |xi(1,1,1) - e| "
                  f"{abs(xi - math.e):.3g}, sandwich {sandwich}/400, c-ratio bounds/monotone {ratios_ok}")


def test_c10_determinism(report):
    grids = {"focusing": [300], "sub": [200, 400], "conn": [100, 200], "super": [200, 400],
             "lemma4": [300, 600], "sparse": [500, 1000]}
    same = 0
    for suite, grid in grids.items():
        a = run_experiment(suite, grid, 3, BASE_SEED, workers=1).to_csv()
        b = run_experiment(suite, grid, 3, BASE_SEED, workers=2).to_csv()
        c = run_experiment(suite, grid, 3, BASE_SEED, workers=3).to_csv()
        same += a == b == c
    report(10, same == len(grids), f"{same}/{len(grids)} suites byte-identical across 1/2/3 workers")


def test_c11_single_trial_performance(report):
    sched = RadiusSchedule("conn", 2.0)
    r = radius_for(sched, 32768, 2)

    def once(seed):
        start = time.perf_counter()
        g = build_graph(sample_points(32768, "uniform-cube", 2, seed, r=r))
        g2 = graph_power(g, 2)
        dsatur(g), dsatur(g2)
        return time.perf_counter() - start

    once(0)  # loads cached kernels
    times = [once(seed) for seed in (1, 2, 3)]
    worst = max(times)
    report(11, worst < 10, f"build + power + DSATUR on G and G^2 at n=32768: "
                           f"{statistics.median(times):.2f}s median, {worst:.2f}s worst (< 10s)")
