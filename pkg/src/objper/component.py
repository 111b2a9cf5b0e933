"""Periodic component estimation and diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InputError
from .scan import PhaseAssignment, ScanResult, _check_theta, phase_barycenters, phase_of
from .spaces import MetricSpace


@dataclass(frozen=True)
class PeriodicComponent:
    """One cycle of fitted phase barycenters, extended periodically in time.

    ``values[l - 1]`` is the estimate for phase ``l``; the value at time ``t``
    is ``values[phase_of(t, period) - 1]`` (the same stored array, not a copy).
    """

    period: int
    values: np.ndarray
    space: MetricSpace
    phase_counts: np.ndarray

    def at(self, t):
        return self.values[phase_of(t, self.period) - 1]

    def extend(self, T):
        """Values at times ``1..T`` as a ``(T, *point_shape)`` array."""
        return self.values[phase_of(np.arange(1, T + 1), self.period) - 1]


def extract_component(series, theta_hat, scan_result=None):
    """Per-phase barycenters for period ``theta_hat``.

    Reuses the barycenters cached in ``scan_result`` when it covers
    ``theta_hat``; otherwise solves them.
    """
    _check_theta(series, theta_hat)
    cached = None
    if isinstance(scan_result, ScanResult) and scan_result.barycenters is not None:
        if theta_hat <= scan_result.theta_max and scan_result.T == series.T:
            cached = scan_result.barycenters[theta_hat - 1]
    values = np.array(cached if cached is not None else phase_barycenters(series, theta_hat))
    for v in values:
        series.space.validate(v)
    values.setflags(write=False)
    counts = PhaseAssignment.build(series.T, theta_hat).counts
    return PeriodicComponent(int(theta_hat), values, series.space, counts)


def _check_truth(estimated, truth):
    truth = np.asarray(truth, dtype=float)
    shape = estimated.space.point_shape
    if truth.ndim != len(shape) + 1 or truth.shape[1:] != shape:
        raise DimensionError(f"truth must have shape (T, {shape}), got {truth.shape}")
    return truth


def component_mse(estimated, truth):
    """Mean over ``t = 1..T`` of the squared distance between estimate and truth."""
    truth = _check_truth(estimated, truth)
    return float(np.mean(estimated.space.sqdist_many(estimated.extend(len(truth)), truth)))


def component_mean_distance(estimated, truth):
    """Mean over ``t = 1..T`` of the (unsquared) distance between estimate and truth."""
    truth = _check_truth(estimated, truth)
    return float(np.mean(np.sqrt(estimated.space.sqdist_many(estimated.extend(len(truth)), truth))))


def component_max_distance(estimated, truth):
    truth = _check_truth(estimated, truth)
    return float(np.sqrt(np.max(estimated.space.sqdist_many(estimated.extend(len(truth)), truth))))


def phase_dispersion(series, component):
    """Mean squared distance of each phase's observations to its fitted value."""
    fitted = component.extend(series.T)
    sq = series.space.sqdist_many(series.points, fitted)
    phases = phase_of(np.arange(1, series.T + 1), component.period)
    return np.bincount(phases - 1, weights=sq, minlength=component.period) / component.phase_counts


def dirichlet_l(t, theta0=12):
    """Mean-controlling schedule of the periodic Dirichlet design.

    ``sin(0.1 + k / (theta0 - 1) * (pi - 0.2))`` with ``k = (t - 1) mod theta0``;
    stays inside ``[sin 0.1, 1)`` for integer ``k``.
    """
    if theta0 < 2:
        raise InputError("theta0 must be >= 2")
    k = np.mod(np.asarray(t) - 1, theta0)
    return np.sin(0.1 + k / (theta0 - 1) * (math.pi - 0.2))


def true_component_dirichlet(t, alpha=1.0, theta0=12):
    """Mean of ``Dir(l_t alpha, l_t alpha, alpha)``: ``(l, l, 1) / (2 l + 1)``.

    The mean does not depend on ``alpha``; it is accepted for symmetry with
    the generator configuration. Vectorized over ``t``.
    """
    if not alpha > 0:
        raise InputError("alpha must be > 0")
    l = dirichlet_l(t, theta0)
    return np.stack([l, l, np.ones_like(l)], axis=-1) / (2 * l + 1)[..., None]
