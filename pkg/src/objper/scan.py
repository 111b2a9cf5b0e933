"""Phase designs, per-phase barycenters and the residual scan over candidate periods."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, InputError
from .spaces import MetricSpace


def phase_of(t, theta):
    """Position of time ``t`` (1-based) within a cycle of length ``theta``.

    Works elementwise on integer arrays. ``phase_of(t, theta)`` is in
    ``1..theta`` and ``phase_of(t + theta, theta) == phase_of(t, theta)``.

    >>> phase_of(13, 12), phase_of(24, 12)
    (1, 12)
    """
    if np.any(np.asarray(theta) < 1):
        raise InputError("theta must be >= 1")
    return t + theta - theta * ((t + theta - 1) // theta)


def default_theta_max(T):
    """``4 * sqrt(T)`` rounded to the nearest integer, capped at ``T``.

    Gives 40, 62 and 89 for ``T`` = 100, 240 and 500.
    """
    return int(min(T, math.floor(4.0 * math.sqrt(T) + 0.5)))


def worker_count():
    """Worker cap from ``OBJPER_THREADS`` (default 1)."""
    raw = os.environ.get("OBJPER_THREADS", "")
    try:
        n = int(raw) if raw else 1
    except ValueError:
        raise InputError(f"OBJPER_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


@dataclass(frozen=True)
class ObjectSeries:
    """Equidistant time series ``Y_1..Y_T`` of points in one metric space.

    ``points`` is stacked along the first axis.
    """

    space: MetricSpace
    points: np.ndarray

    def __post_init__(self):
        pts = self.space.validate_many(self.points)
        if pts.shape[0] < 2:
            raise InputError("a series needs T >= 2 observations")
        object.__setattr__(self, "points", pts)
        flat = pts.reshape(len(pts), -1)
        object.__setattr__(self, "_rank", np.lexsort(flat.T[::-1]).argsort())

    @property
    def rank(self):
        """Lexicographic rank of each observation; fixes the summation order inside a phase."""
        return self._rank

    @property
    def T(self):
        return self.points.shape[0]

    def __len__(self):
        return self.T

    def __getitem__(self, i):
        return self.points[i]


@dataclass(frozen=True)
class PhaseAssignment:
    theta: int
    phases: np.ndarray
    counts: np.ndarray

    @classmethod
    def build(cls, T, theta):
        if theta < 1:
            raise InputError("theta must be >= 1")
        phases = phase_of(np.arange(1, T + 1), theta)
        counts = np.bincount(phases, minlength=theta + 1)[1:]
        return cls(theta, phases, counts)

    @property
    def order(self):
        """Time indices (0-based) sorted by phase, stable within a phase."""
        return np.argsort(self.phases, kind="stable").astype(np.intp)

    @property
    def offsets(self):
        return np.concatenate([[0], np.cumsum(self.counts)]).astype(np.intp)

    def weights(self):
        """Dense ``T x T`` matrix whose row ``t`` holds the weights of fitted value ``t``.

        Entry ``(t, i)`` is ``1 / n_l`` when ``t`` and ``i`` share phase ``l``,
        else 0; this is the hat matrix of least squares on phase indicators.
        """
        same = self.phases[:, None] == self.phases[None, :]
        return same / self.counts[self.phases - 1][:, None]


def _check_theta(series, theta):
    if int(theta) != theta or theta < 1:
        raise InputError(f"theta must be a positive integer, got {theta}")
    if theta > series.T:
        raise InputError(f"theta={theta} exceeds the series length T={series.T}")


def _fit(series, theta):
    design = PhaseAssignment.build(series.T, theta)
    # members in value order, so permuting a phase cannot change a single bit
    order = np.lexsort((series.rank, design.phases)).astype(np.intp)
    try:
        means, sq = series.space.group_means(series.points, order, design.offsets)
    except ConvergenceError as exc:
        raise exc.with_context(theta=theta) from None
    return means, float(np.sum(sq[order]))


def phase_barycenters(series, theta):
    """Fréchet mean of each phase's observations, as an array of ``theta`` points."""
    _check_theta(series, theta)
    return _fit(series, theta)[0]


def rss(series, theta):
    """Sum of squared distances of every observation to its phase barycenter."""
    _check_theta(series, theta)
    return _fit(series, theta)[1]


@dataclass
class ScanResult:
    """Residual sums of squares for ``theta = 1..theta_max``.

    ``rss[k]`` belongs to candidate ``theta = k + 1``. ``barycenters[k]`` is
    the ``(k + 1, *point_shape)`` array of fitted phase means, or ``None``
    when the scan was run with ``keep_barycenters=False``.
    """

    rss: np.ndarray
    theta_max: int
    T: int
    barycenters: list = field(default=None, repr=False)

    def __post_init__(self):
        self.rss = np.asarray(self.rss, dtype=float)
        if self.rss.shape != (self.theta_max,):
            raise InputError("rss must have length theta_max")
        if np.any(~np.isfinite(self.rss)) or np.any(self.rss < 0):
            raise InputError("rss values must be finite and nonnegative")

    @property
    def thetas(self):
        return np.arange(1, self.theta_max + 1)

    def rss_at(self, theta):
        return float(self.rss[theta - 1])


def scan(series, theta_max=None, *, workers=None, keep_barycenters=True):
    """Fit every candidate period ``1..theta_max`` and collect the residuals.

    Candidates run on a thread pool of ``workers`` threads (default from
    ``OBJPER_THREADS``); the compiled kernels release the GIL. Results are
    merged by candidate index, so the output does not depend on scheduling.
    """
    T = series.T
    if theta_max is None:
        theta_max = default_theta_max(T)
    if int(theta_max) != theta_max or theta_max < 1:
        raise InputError("theta_max must be a positive integer")
    if theta_max > T:
        raise InputError(f"theta_max={theta_max} exceeds the series length T={T}")
    workers = worker_count() if workers is None else max(1, int(workers))
    thetas = range(1, theta_max + 1)
    if workers == 1:
        fits = [_fit(series, th) for th in thetas]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            fits = list(pool.map(lambda th: _fit(series, th), thetas))
    return ScanResult(
        rss=np.array([f[1] for f in fits]),
        theta_max=int(theta_max),
        T=T,
        barycenters=[f[0] for f in fits] if keep_barycenters else None,
    )


def penalized_loss(result, lam):
    """``rss[theta] + lam * theta`` for every candidate."""
    if not lam >= 0:
        raise InputError("lambda must be >= 0")
    return result.rss + lam * result.thetas


def estimate_period(result, lam):
    """Smallest candidate minimizing the penalized loss."""
    return int(np.argmin(penalized_loss(result, lam))) + 1
