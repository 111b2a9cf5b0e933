"""Generators for periodic object series and a seeded Monte Carlo harness.

Three families are provided:

* ``dirichlet`` -- compositions ``Dir(l_t a, l_t a, a)`` mapped to the
  sphere by component-wise square roots (a standard design for this problem);
* ``network`` -- graph Laplacians of weighted networks whose edge
  intensities oscillate around a random baseline;
* ``distribution`` -- Gaussian quantile functions with periodic location
  and scale.

The network and distribution designs are this package's own. Random
streams come from NumPy's counter-based Philox generator keyed by
``(seed, replicate)``, so runs are reproducible across platforms and
independent of scheduling.
"""

from __future__ import annotations

import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from .component import (
    component_mean_distance,
    component_mse,
    dirichlet_l,
    extract_component,
    true_component_dirichlet,
)
from .errors import InputError, ObjperError
from .scan import ObjectSeries, default_theta_max, phase_of, scan, worker_count
from .spaces import LaplacianSpace, SphereSpace, Wasserstein1DSpace, quantile_levels
from .tuning import Criterion, parse_criterion, select

FAMILIES = ("dirichlet", "network", "distribution")


def rng_for(seed, replicate=0):
    """Philox generator for replicate ``replicate`` of a run seeded with ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(replicate)])))


def l_schedule(t, theta0=12):
    """Mean-controlling schedule ``l_t`` of the Dirichlet design (vectorized)."""
    return dirichlet_l(t, theta0)


def _phase_angle(T, theta0):
    # cell centres: with theta0 = 2 the angles are pi/2 and 3pi/2, not the zeros of sin
    return 2.0 * math.pi * (phase_of(np.arange(1, T + 1), theta0) - 0.5) / theta0


@dataclass(frozen=True)
class DirichletConfig:
    """Smaller ``alpha`` means noisier compositions; ``noise=False`` yields the means."""

    T: int = 240
    alpha: float = 1.0
    theta0: int = 12
    seed: int = 0
    noise: bool = True

    family = "dirichlet"

    def __post_init__(self):
        if not self.alpha > 0:
            raise InputError("alpha must be > 0")
        if self.theta0 < 2:
            raise InputError("theta0 must be >= 2")
        if self.T < self.theta0:
            raise InputError("T must be >= theta0")


@dataclass(frozen=True)
class NetworkConfig:
    """Weighted network on ``p`` nodes with periodic edge intensities.

    Edge ``(i, j)`` has weight ``max(0, base_ij + amplitude * sin(phi_t) *
    pattern_ij + noise * e_ijt)`` where ``phi_t = 2 pi (r(t, theta0) - 1/2) /
    theta0``, ``base_ij ~ U(1.5, 3)`` and ``pattern_ij ~ U(-1, 1)``. Base and
    pattern are drawn once per seed and shared by all replicates.
    """

    T: int = 240
    theta0: int = 12
    p: int = 10
    amplitude: float = 1.0
    noise: float = 0.5
    seed: int = 0

    family = "network"

    def __post_init__(self):
        if self.p < 2:
            raise InputError("p must be >= 2")
        if self.amplitude < 0 or self.noise < 0:
            raise InputError("amplitude and noise must be >= 0")
        if self.theta0 < 1 or self.T < self.theta0:
            raise InputError("need 1 <= theta0 <= T")


@dataclass(frozen=True)
class DistributionConfig:
    """Quantiles of ``N(mu_t, sigma_t^2)`` on ``M`` mid-levels.

    ``mu_t = amplitude * sin(phi_t) + noise * e_t`` and
    ``sigma_t = 1 + 0.2 * cos(phi_t)``, with ``phi_t`` as for networks.
    """

    T: int = 240
    theta0: int = 12
    M: int = 100
    amplitude: float = 3.0
    noise: float = 0.5
    seed: int = 0

    family = "distribution"

    def __post_init__(self):
        if self.M < 2:
            raise InputError("M must be >= 2")
        if self.amplitude < 0 or self.noise < 0:
            raise InputError("amplitude and noise must be >= 0")
        if self.theta0 < 1 or self.T < self.theta0:
            raise InputError("need 1 <= theta0 <= T")


CONFIGS = {"dirichlet": DirichletConfig, "network": NetworkConfig, "distribution": DistributionConfig}


def make_config(family, **kwargs):
    try:
        cls = CONFIGS[family]
    except KeyError:
        raise InputError(f"unknown family {family!r}; expected one of {FAMILIES}") from None
    return cls(**kwargs)


# -- Dirichlet ---------------------------------------------------------------


def dirichlet_compositions(config, rng):
    """Raw simplex draws, shape ``(T, 3)``, via normalized independent Gamma variates."""
    t = np.arange(1, config.T + 1)
    if not config.noise:
        return true_component_dirichlet(t, config.alpha, config.theta0)
    l = l_schedule(t, config.theta0)
    shape = np.stack([l * config.alpha, l * config.alpha, np.full(config.T, config.alpha)], axis=1)
    g = rng.standard_gamma(shape)
    total = g.sum(axis=1)
    # all three Gamma draws can underflow to 0 for tiny shapes; redraw those rows
    while np.any(total == 0):
        bad = total == 0
        g[bad] = rng.standard_gamma(shape[bad])
        total = g.sum(axis=1)
    return g / total[:, None]


def generate_dirichlet(config, replicate=0, rng=None):
    rng = rng_for(config.seed, replicate) if rng is None else rng
    comps = dirichlet_compositions(config, rng)
    return ObjectSeries(SphereSpace(dim=3), np.sqrt(comps))


def _dirichlet_truth(config):
    return np.sqrt(true_component_dirichlet(np.arange(1, config.T + 1), config.alpha, config.theta0))


# -- networks ----------------------------------------------------------------


def _symmetric_uniform(rng, p, lo, hi):
    a = np.triu(rng.uniform(lo, hi, size=(p, p)), 1)
    return a + a.T


def network_structure(config):
    """``(base, pattern)`` edge matrices for ``config.seed``; zero diagonals."""
    ss = np.random.SeedSequence(int(config.seed), spawn_key=(0,))
    rng = np.random.Generator(np.random.Philox(ss))
    base = _symmetric_uniform(rng, config.p, 1.5, 3.0)
    return base, _symmetric_uniform(rng, config.p, -1.0, 1.0)


def _laplacians(adj):
    adj = adj.copy()
    idx = np.arange(adj.shape[1])
    adj[:, idx, idx] = 0.0
    deg = adj.sum(axis=2)
    lap = -adj
    lap[:, idx, idx] = deg
    return lap


def _network_signal(config):
    base, pattern = network_structure(config)
    wave = config.amplitude * np.sin(_phase_angle(config.T, config.theta0))
    return base[None] + wave[:, None, None] * pattern[None]


def generate_networks(config, replicate=0, rng=None):
    rng = rng_for(config.seed, replicate) if rng is None else rng
    adj = _network_signal(config)
    if config.noise > 0:
        e = rng.standard_normal(adj.shape)
        e = np.triu(e, 1)
        adj = adj + config.noise * (e + np.transpose(e, (0, 2, 1)))
    adj = np.maximum(adj, 0.0)
    return ObjectSeries(LaplacianSpace(dim=config.p), _laplacians(adj))


def _network_truth(config):
    return _laplacians(np.maximum(_network_signal(config), 0.0))


# -- distributions -----------------------------------------------------------


@lru_cache(maxsize=16)
def standard_normal_quantiles(M):
    """Standard normal quantiles at the ``M`` mid-levels (read-only)."""
    nd = statistics.NormalDist()
    q = np.array([nd.inv_cdf(u) for u in quantile_levels(M)])
    q.setflags(write=False)
    return q


def _distribution_params(config):
    phi = _phase_angle(config.T, config.theta0)
    return config.amplitude * np.sin(phi), 1.0 + 0.2 * np.cos(phi)


def generate_distributions(config, replicate=0, rng=None):
    rng = rng_for(config.seed, replicate) if rng is None else rng
    mu, sigma = _distribution_params(config)
    if config.noise > 0:
        mu = mu + config.noise * rng.standard_normal(config.T)
    z = standard_normal_quantiles(config.M)
    return ObjectSeries(Wasserstein1DSpace(dim=config.M), mu[:, None] + sigma[:, None] * z[None])


def _distribution_truth(config):
    mu, sigma = _distribution_params(config)
    return mu[:, None] + sigma[:, None] * standard_normal_quantiles(config.M)[None]


_GENERATORS = {
    "dirichlet": (generate_dirichlet, _dirichlet_truth),
    "network": (generate_networks, _network_truth),
    "distribution": (generate_distributions, _distribution_truth),
}


def generate(config, replicate=0):
    """Series for replicate ``replicate`` of any family configuration."""
    return _GENERATORS[config.family][0](config, replicate)


def true_series(config):
    """The noiseless periodic component at times ``1..T`` for ``config``."""
    return _GENERATORS[config.family][1](config)


# -- Monte Carlo -------------------------------------------------------------


@dataclass
class MonteCarloReport:
    family: str
    config: dict
    criterion: str
    g_value: float
    theta_max: int
    replicates: int
    theta0: int
    window: tuple
    thetas: list
    failures: list
    p_exact: float
    p_window: float
    histogram: dict
    mse_mean: float
    mse_median: float
    mean_distance_mean: float
    timing: dict = field(default=None)

    def p_equal(self, a):
        return sum(1 for t in self.thetas if t == a) / self.replicates

    def p_between(self, lo, hi):
        return sum(1 for t in self.thetas if t is not None and lo <= t <= hi) / self.replicates

    def to_dict(self):
        d = asdict(self)
        d["window"] = list(self.window)
        d["histogram"] = {str(k): v for k, v in sorted(self.histogram.items())}
        if d["timing"] is None:
            del d["timing"]
        return d


def _nan_to_none(x):
    return None if x is None or (isinstance(x, float) and math.isnan(x)) else x


def _replicate(config, r, kind, g, theta_max, truth):
    t0 = time.perf_counter()
    try:
        series = generate(config, r)
        result = scan(series, theta_max, workers=1, keep_barycenters=False)
        report = select(result, kind, g)
        comp = extract_component(series, report.selected_theta)
        return {
            "theta": report.selected_theta,
            "g": report.g_value,
            "mse": component_mse(comp, truth),
            "dist": component_mean_distance(comp, truth),
            "seconds": time.perf_counter() - t0,
        }
    except ObjperError as exc:
        return {"error": type(exc).__name__, "message": str(exc), "replicate": r,
                "seconds": time.perf_counter() - t0}


def run_monte_carlo(config, replicates=200, kind=Criterion.RSS, *, g=None, theta_max=None,
                    workers=None, window=None, timing=False):
    """Run scan -> select -> extract on ``replicates`` independent seeded series.

    Solver failures are recorded per replicate and counted as misses; the
    run itself never aborts on them. ``window`` is the inclusive range for
    ``p_window`` and defaults to ``theta0 +/- theta0 // 3`` (8..16 for 12).
    """
    if int(replicates) != replicates or replicates < 1:
        raise InputError("replicates must be a positive integer")
    kind = parse_criterion(kind)
    theta_max = default_theta_max(config.T) if theta_max is None else int(theta_max)
    if window is None:
        window = (config.theta0 - config.theta0 // 3, config.theta0 + config.theta0 // 3)
    truth = true_series(config)
    workers = worker_count() if workers is None else max(1, int(workers))
    args = (kind, g, theta_max, truth)
    t0 = time.perf_counter()
    if workers == 1:
        outs = [_replicate(config, r, *args) for r in range(replicates)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(lambda r: _replicate(config, r, *args), range(replicates)))
    wall = time.perf_counter() - t0

    ok = [o for o in outs if "theta" in o]
    thetas = [o.get("theta") for o in outs]
    hist = {}
    for t in thetas:
        if t is not None:
            hist[t] = hist.get(t, 0) + 1
    mses = np.array([o["mse"] for o in ok])
    dists = np.array([o["dist"] for o in ok])
    g_value = ok[0]["g"] if ok else (float("nan") if g is None else float(g))
    report = MonteCarloReport(
        family=config.family,
        config=asdict(config),
        criterion=kind.value,
        g_value=_nan_to_none(g_value),
        theta_max=theta_max,
        replicates=int(replicates),
        theta0=config.theta0,
        window=tuple(window),
        thetas=thetas,
        failures=[{k: o[k] for k in ("replicate", "error", "message")} for o in outs if "error" in o],
        p_exact=0.0,
        p_window=0.0,
        histogram=hist,
        mse_mean=_nan_to_none(float(mses.mean())) if len(mses) else None,
        mse_median=_nan_to_none(float(np.median(mses))) if len(mses) else None,
        mean_distance_mean=float(dists.mean()) if len(dists) else None,
    )
    report.p_exact = report.p_equal(config.theta0)
    report.p_window = report.p_between(*window)
    if timing:
        per = [o["seconds"] for o in outs]
        report.timing = {"wall_seconds": wall, "replicate_mean_seconds": float(np.mean(per)),
                         "replicate_max_seconds": float(np.max(per)), "workers": workers}
    return report
