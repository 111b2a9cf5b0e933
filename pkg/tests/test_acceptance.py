"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line (printed in the pytest terminal summary
and when the module is run as a script). Monte Carlo cells use 200
replicates with seed 2024 and are shared between criteria.

Run directly with ``python3 tests/test_acceptance.py``.
"""

import math
import sys
import time
from functools import lru_cache

import numpy as np

from objper import (
    ObjectSeries,
    PhaseAssignment,
    SphereSpace,
    Wasserstein1DSpace,
    g_default,
    information_criterion,
    lambda_path,
    phase_barycenters,
    phase_of,
    rss,
    scan,
    select,
)
from objper import simulation as sim

from conftest import random_sphere_points
from oracles import brute_theta, cap_grid_mean

SEED = 2024
REPS = 200
RESULTS = []


def record(criterion, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {criterion}: {detail}"
    RESULTS.append(line)
    return ok


@lru_cache(maxsize=None)
def dirichlet_cell(T, alpha, kind="rss"):
    return sim.run_monte_carlo(sim.DirichletConfig(T=T, alpha=alpha, seed=SEED), REPS, kind)


def _mode(report):
    return max(report.histogram.items(), key=lambda kv: kv[1]) if report.histogram else None


def test_criterion_1_rss_hit_rates():
    cells = [((100, 1.0), 0.85), ((240, 1.0), 0.97), ((500, 0.5), 0.97)]
    parts, ok = [], True
    for (T, a), bound in cells:
        r = dirichlet_cell(T, a, "rss")
        ok &= r.p_exact >= bound
        parts.append(f"T={T},alpha={a:g}: p={r.p_exact:.3f} (>= {bound}, mode {_mode(r)})")
    assert record(1, ok, "; ".join(parts))


def test_criterion_2_log_rss_hit_rates():
    cells = [((100, 1.0), 0.78), ((240, 1.0), 0.95)]
    parts, ok = [], True
    for (T, a), bound in cells:
        r = dirichlet_cell(T, a, "log_rss")
        ok &= r.p_exact >= bound
        parts.append(f"T={T},alpha={a:g}: p={r.p_exact:.3f} (>= {bound}, mode {_mode(r)})")
    assert record(2, ok, "; ".join(parts))


def test_criterion_3_component_mse():
    mid = dirichlet_cell(240, 1.0).mse_mean
    ok = 0.075 <= mid <= 0.15
    parts = [f"MSE(T=240,alpha=1)={mid:.4f} in [0.075, 0.15]: {ok}"]
    for a in (1.0, 0.5, 0.1):
        m = [dirichlet_cell(T, a).mse_mean for T in (100, 240, 500)]
        dec = m[0] > m[1] > m[2]
        ok &= dec
        parts.append(f"alpha={a:g} MSE by T {[round(x, 4) for x in m]} decreasing: {dec}")
    assert record(3, ok, "; ".join(parts))


def test_criterion_4_multiples_cluster():
    r100 = dirichlet_cell(100, 0.1)
    near = sum(n for t, n in r100.histogram.items() if t in (12, 24, 36) or 8 <= t <= 16) / r100.replicates
    r500 = dirichlet_cell(500, 0.1)
    ok = near >= 0.80 and r500.p_exact >= 0.80
    assert record(
        4, ok,
        f"T=100,alpha=0.1 share in {{12,24,36}} or [8,16] = {near:.3f} (>= 0.80); "
        f"T=500,alpha=0.1 p(12) = {r500.p_exact:.3f} (>= 0.80)",
    )


def test_criterion_5_oracle_suites():
    rng = np.random.default_rng(SEED)
    # lambda path against a 10^4-point grid
    path_ok = 0
    for _ in range(200):
        n = int(rng.integers(1, 65))
        r = rng.random(n) * 10 if rng.random() < 0.5 else rng.integers(0, 6, n).astype(float)
        path = lambda_path(r)
        grid = np.linspace(0.0, 1.5 * path.breakpoints[-1] + 1.0, 10_000)
        path_ok += np.array_equal(path.theta_at(grid), brute_theta(r, grid))
    # sphere mean against a cap grid
    S2 = SphereSpace(3)
    worst_cap = max(
        S2.distance(S2.frechet_mean(p), cap_grid_mean(p))
        for p in (random_sphere_points(rng, 3, spread=0.6) for _ in range(50))
    )
    # W2 against the Gaussian closed form
    z = sim.standard_normal_quantiles(100)
    w2_err = abs(Wasserstein1DSpace(100).distance(z, z + 1.0) - 1.0)
    # grouped against hat-matrix weighted solves
    worst_group, worst_rss = 0.0, 0.0
    for _ in range(100):
        T = int(rng.integers(6, 40))
        theta = int(rng.integers(1, T // 2 + 1))
        series = ObjectSeries(S2, random_sphere_points(rng, T, spread=0.5))
        means = phase_barycenters(series, theta)
        W = PhaseAssignment.build(T, theta).weights()
        fitted = np.array([S2.frechet_mean(series.points, W[t]) for t in range(T)])
        ph = phase_of(np.arange(1, T + 1), theta) - 1
        worst_group = max(worst_group, float(np.sqrt(S2.sqdist_many(fitted, means[ph]).max())))
        rw = float(np.sum(S2.sqdist_many(series.points, fitted)))
        worst_rss = max(worst_rss, abs(rw - rss(series, theta)) / max(rw, 1e-300))
    tol = S2.tolerance
    ok = path_ok == 200 and worst_cap < 0.01 and w2_err < 1e-3 and worst_group < 10 * tol and worst_rss < 1e-8
    assert record(
        5, ok,
        f"lambda path {path_ok}/200 exact; cap grid worst {worst_cap:.2e} rad (< 0.01); "
        f"W2 error {w2_err:.1e} (< 1e-3); grouped vs weighted {worst_group:.1e} (< {10 * tol:.0e}), "
        f"RSS rel {worst_rss:.1e} (< 1e-8)",
    )


def test_criterion_6_exact_recovery():
    t0 = time.perf_counter()
    parts, ok = [], True
    for family in sim.FAMILIES:
        for theta0 in (2, 3, 7, 12):
            hits = 0
            for seed in range(50):
                noise = {"noise": False} if family == "dirichlet" else {"noise": 0.0}
                cfg = sim.make_config(family, T=240, theta0=theta0, seed=seed, **noise)
                hits += select(scan(sim.generate(cfg))).selected_theta == theta0
            ok &= hits == 50
            parts.append(f"{family}/{theta0}:{hits}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 60
    assert record(6, ok, f"hits of 50 per family/theta0: {' '.join(parts)}; {elapsed:.1f}s (< 60s)")


def test_criterion_7_surrogates():
    # hit rates nondecreasing in T within two-sided 95% binomial bands
    trend_ok = True
    trend = []
    for a in (1.0, 0.5, 0.1):
        p = [dirichlet_cell(T, a).p_exact for T in (100, 240, 500)]
        for lo, hi in zip(p, p[1:]):
            band = 1.96 * math.sqrt(max(lo * (1 - lo), hi * (1 - hi), 1 / REPS) / REPS) * math.sqrt(2)
            trend_ok &= hi >= lo - band
        trend.append(f"alpha={a:g} {p}")
    # IC at theta0 strictly below IC at every overfit multiple, noiseless series
    dominance_ok = True
    for family in sim.FAMILIES:
        for theta0 in (2, 3, 7, 12):
            noise = {"noise": False} if family == "dirichlet" else {"noise": 0.0}
            res = scan(sim.generate(sim.make_config(family, T=240, theta0=theta0, **noise)))
            g = g_default(res.T, res.theta_max)
            ic0 = information_criterion(res, theta0, g)
            dominance_ok &= all(
                ic0 < information_criterion(res, k * theta0, g) for k in range(2, res.theta_max // theta0 + 1)
            )
    ok = trend_ok and dominance_ok
    assert record(7, ok, f"hit-rate trend in T ok={trend_ok} ({'; '.join(trend)}); IC dominance ok={dominance_ok}")


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    failed = 0
    for fn in tests:
        try:
            fn()
        except AssertionError:
            failed += 1
        print(RESULTS[-1], flush=True)
    sys.exit(1 if failed else 0)
