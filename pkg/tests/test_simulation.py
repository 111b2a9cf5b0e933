import numpy as np
import pytest

from objper import ConvergenceError, InputError, scan, select
from objper import simulation as sim
from objper.component import true_component_dirichlet


def test_l_schedule_is_periodic(rng):
    t = rng.integers(1, 10**6, size=100)
    np.testing.assert_array_equal(sim.l_schedule(t), sim.l_schedule(t + 12))
    assert sim.l_schedule(1) == np.sin(0.1)


def test_config_invariants():
    with pytest.raises(InputError):
        sim.DirichletConfig(alpha=0.0)
    with pytest.raises(InputError):
        sim.DirichletConfig(T=10, theta0=12)
    with pytest.raises(InputError):
        sim.NetworkConfig(p=1)
    with pytest.raises(InputError):
        sim.NetworkConfig(noise=-1.0)
    with pytest.raises(InputError):
        sim.DistributionConfig(M=1)
    with pytest.raises(InputError):
        sim.make_config("torus")


def test_dirichlet_sample_mean_matches_closed_form():
    cfg = sim.DirichletConfig(T=12 * 100_000, alpha=1.0, seed=1)
    comps = sim.dirichlet_compositions(cfg, sim.rng_for(1))
    for phase in (1, 6, 12):
        mean = comps[phase - 1 :: 12].mean(axis=0)
        np.testing.assert_allclose(mean, true_component_dirichlet(phase), atol=0.01)


def test_dirichlet_series_lies_on_the_sphere():
    series = sim.generate_dirichlet(sim.DirichletConfig(T=50, alpha=0.1, seed=3))
    np.testing.assert_allclose(np.linalg.norm(series.points, axis=1), 1.0, atol=1e-12)
    assert np.all(series.points >= 0)


@pytest.mark.parametrize("family", sim.FAMILIES)
def test_seeds_reproduce(family):
    cfg = sim.make_config(family, T=40, seed=5)
    a, b = sim.generate(cfg, 3), sim.generate(cfg, 3)
    assert a.points.tobytes() == b.points.tobytes()
    assert sim.generate(cfg, 4).points.tobytes() != a.points.tobytes()


def _energy_statistic(D, labels):
    x, y = labels, ~labels
    return 2 * D[np.ix_(x, y)].mean() - D[np.ix_(x, x)].mean() - D[np.ix_(y, y)].mean()


def test_marginal_repeats_after_one_period():
    """Two-sample energy permutation test: Y_t and Y_{t+12} share a distribution."""
    cfg = sim.DirichletConfig(T=24, alpha=0.5, seed=8)
    n = 800
    a = np.empty((n, 3))
    b = np.empty((n, 3))
    for r in range(n):
        pts = sim.generate(cfg, r).points
        a[r], b[r] = pts[2], pts[14]
    z = np.vstack([a, b])
    D = np.linalg.norm(z[:, None] - z[None], axis=-1)
    labels = np.arange(2 * n) < n
    observed = _energy_statistic(D, labels)
    perm_rng = np.random.default_rng(0)
    null = [_energy_statistic(D, perm_rng.permutation(labels)) for _ in range(199)]
    p_value = (1 + sum(s >= observed for s in null)) / 200
    assert p_value > 0.01


def test_variance_grows_as_alpha_shrinks():
    variances = []
    for alpha in (1.0, 0.5, 0.1):
        cfg = sim.DirichletConfig(T=12 * 10_000, alpha=alpha, seed=2)
        comps = sim.dirichlet_compositions(cfg, sim.rng_for(2))
        variances.append(comps[3::12].var(axis=0))
    assert np.all(variances[0] < variances[1]) and np.all(variances[1] < variances[2])


def test_noiseless_dirichlet_equals_truth():
    cfg = sim.DirichletConfig(T=36, noise=False)
    np.testing.assert_array_equal(sim.generate(cfg).points, sim.true_series(cfg))


def test_network_structure():
    cfg = sim.NetworkConfig(T=24, p=6, seed=1)
    base, pattern = sim.network_structure(cfg)
    assert np.array_equal(base, base.T) and np.all(np.diag(base) == 0)
    assert base[~np.eye(6, dtype=bool)].min() >= 1.5
    series = sim.generate_networks(cfg)
    np.testing.assert_allclose(series.points.sum(axis=2), 0.0, atol=1e-12)


def test_constant_designs_select_one():
    flat_net = sim.generate(sim.NetworkConfig(T=120, amplitude=0.0, noise=0.0))
    assert np.all(scan(flat_net).rss == 0)
    assert select(scan(flat_net)).selected_theta == 1
    flat_loc = sim.generate(sim.DistributionConfig(T=120, amplitude=0.0))
    assert select(scan(flat_loc)).selected_theta == 1


def test_distribution_quantiles_are_monotone():
    series = sim.generate_distributions(sim.DistributionConfig(T=30, M=50, noise=2.0))
    assert np.all(np.diff(series.points, axis=1) >= 0)


def test_default_network_design_recovers_the_period():
    report = sim.run_monte_carlo(sim.NetworkConfig(T=240), 200)
    assert report.p_exact >= 0.9


def test_report_invariants_and_determinism():
    cfg = sim.DistributionConfig(T=100, seed=3)
    a = sim.run_monte_carlo(cfg, 12)
    b = sim.run_monte_carlo(cfg, 12, workers=3)
    assert a.to_dict() == b.to_dict()
    assert a.window == (8, 16)
    assert sum(a.histogram.values()) + len(a.failures) == a.replicates
    assert 0 <= a.p_window <= 1 and a.p_exact <= a.p_window
    assert "timing" not in a.to_dict()
    assert "wall_seconds" in sim.run_monte_carlo(cfg, 2, timing=True).timing


def test_solver_failures_are_counted(monkeypatch):
    real_scan = sim.scan

    def flaky(series, *args, **kwargs):
        if series.points[0, 0] < 0.5:
            raise ConvergenceError("forced", context={"theta": 1})
        return real_scan(series, *args, **kwargs)

    monkeypatch.setattr(sim, "scan", flaky)
    report = sim.run_monte_carlo(sim.DirichletConfig(T=60, alpha=0.5), 20)
    assert report.failures
    assert all(f["error"] == "ConvergenceError" for f in report.failures)
    assert sum(report.histogram.values()) + len(report.failures) == 20
    assert report.thetas.count(None) == len(report.failures)


def test_replicate_count_validated():
    with pytest.raises(InputError):
        sim.run_monte_carlo(sim.DirichletConfig(T=24), 0)
