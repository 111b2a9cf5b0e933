"""Metric spaces, their distances and weighted Fréchet means.

Points are plain read-only NumPy arrays; each space knows the shape of its
points and how to validate them. Four spaces are provided:

========================  ==============  ==================================
kind                      point shape     distance
========================  ==============  ==================================
``sphere``                ``(p,)``        geodesic (great-circle) distance
``laplacian``             ``(p, p)``      Frobenius norm of the difference
``wasserstein1d``         ``(M,)``        root-mean-square of quantile gaps
``euclidean``             ``(p,)``        Euclidean norm of the difference
========================  ==============  ==================================

Only the sphere needs an iterative solver; the other three have closed-form
weighted means (weighted averages of coordinates).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._backend import DEGENERATE, NOT_CONVERGED, kernels
from .errors import (
    ConvergenceError,
    DegenerateConfigurationError,
    DegenerateWeightsError,
    DimensionError,
    InputError,
    InvalidAdjacencyError,
    InvalidCompositionError,
    InvalidPointError,
)

SPACE_KINDS = ("sphere", "laplacian", "wasserstein1d", "euclidean")

UNIT_NORM_TOL = 1e-9
STRUCTURE_TOL = 1e-9
COMPOSITION_TOL = 1e-9
ZERO_PART_TOL = 1e-12


class MultimodalMeanWarning(RuntimeWarning):
    """Restarted spherical mean solves converged to different points."""


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def normalize_weights(weights, n):
    """Validate nonnegative weights of length ``n`` and rescale them to sum to 1."""
    w = np.asarray(weights, dtype=float).reshape(-1)
    if w.shape[0] != n:
        raise DimensionError(f"expected {n} weights, got {w.shape[0]}")
    if not np.all(np.isfinite(w)):
        raise InputError("weights must be finite")
    if np.any(w < 0):
        raise InputError("weights must be nonnegative")
    total = w.sum()
    if total <= 0:
        raise DegenerateWeightsError("weights sum to zero")
    return w / total


@dataclass(frozen=True)
class MetricSpace:
    """Common interface. Subclasses fix ``kind`` and the point shape.

    Parameters
    ----------
    dim : int
        ``p`` for sphere/euclidean/laplacian, the grid size ``M`` for
        wasserstein1d.
    tolerance, max_iterations :
        Solver settings; only the sphere uses them, but they are validated
        for every space so configurations stay interchangeable.
    """

    dim: int
    tolerance: float = 1e-10
    max_iterations: int = 200

    kind = "abstract"
    closed_form = True

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise InputError(f"dim must be a positive integer, got {self.dim}")
        if not self.tolerance > 0:
            raise InputError("tolerance must be > 0")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise InputError("max_iterations must be >= 1")

    @property
    def point_shape(self):
        return (self.dim,)

    # -- points -----------------------------------------------------------
    def _check_shape(self, a):
        a = np.asarray(a, dtype=float)
        if a.shape != self.point_shape:
            raise DimensionError(
                f"{self.kind} point must have shape {self.point_shape}, got {a.shape}"
            )
        if not np.all(np.isfinite(a)):
            raise InvalidPointError(f"{self.kind} point has non-finite coordinates")
        return a

    def validate(self, a):
        """Return ``a`` as a read-only array after checking the point invariants."""
        return _frozen(self._check_shape(a))

    def validate_many(self, points):
        """Validate a stack of points of shape ``(n, *point_shape)``."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim != len(self.point_shape) + 1 or pts.shape[1:] != self.point_shape:
            raise DimensionError(
                f"expected points of shape (n, {', '.join(map(str, self.point_shape))}), "
                f"got {pts.shape}"
            )
        for i in range(pts.shape[0]):
            try:
                self._check_point(pts[i])
            except InputError as exc:
                raise type(exc)(f"point {i}: {exc}") from None
        return _frozen(pts)

    def _check_point(self, a):
        self._check_shape(a)

    # -- geometry ---------------------------------------------------------
    def sqdist_many(self, points, targets):
        """Row-wise squared distances between two equally long stacks of points."""
        diff = np.asarray(points, dtype=float) - np.asarray(targets, dtype=float)
        axes = tuple(range(1, diff.ndim))
        return np.sum(diff * diff, axis=axes)

    def distance(self, a, b):
        a = self._check_shape(a)
        b = self._check_shape(b)
        return float(math.sqrt(self.sqdist_many(a[None], b[None])[0]))

    def frechet_mean(self, points, weights=None):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == len(self.point_shape):
            pts = pts[None]
        if pts.shape[0] == 0:
            raise InputError("frechet_mean needs at least one point")
        if pts.shape[1:] != self.point_shape:
            raise DimensionError(f"points must have shape (n, {self.point_shape}), got {pts.shape}")
        n = pts.shape[0]
        w = np.full(n, 1.0 / n) if weights is None else normalize_weights(weights, n)
        return self._weighted_mean(pts, w)

    def _weighted_mean(self, pts, w):
        mean = np.tensordot(w, pts, axes=1)
        self._assert_structure(mean)
        return _frozen(mean)

    def _assert_structure(self, mean):
        self._check_point(mean)

    def group_means(self, points, order, offsets):
        """Uniform-weight means of the groups ``order[offsets[l]:offsets[l+1]]``.

        Returns ``(means, sqdist)`` where ``sqdist[t]`` is the squared distance
        of ``points[t]`` to its own group's mean. A group whose members are
        bitwise identical returns that member exactly, so noiseless periodic
        data have zero residuals.
        """
        pts = np.asarray(points, dtype=float)
        counts = np.diff(offsets)
        starts = np.asarray(offsets[:-1])
        ordered = pts[order]
        sums = np.add.reduceat(ordered, starts, axis=0)
        shape = (-1,) + (1,) * len(self.point_shape)
        means = sums / counts.reshape(shape)
        identical, refs = _identical_groups(ordered, counts, starts)
        means[identical] = refs[identical]
        labels = np.empty(len(pts), dtype=np.intp)
        labels[order] = np.repeat(np.arange(len(counts)), counts)
        return means, self.sqdist_many(pts, means[labels])


def _identical_groups(ordered, counts, starts):
    """Mask of groups whose members are bitwise equal, and each group's first member."""
    refs = ordered[starts]
    same = np.all((ordered == np.repeat(refs, counts, axis=0)).reshape(len(ordered), -1), axis=1)
    return np.logical_and.reduceat(same, starts), refs


@dataclass(frozen=True)
class EuclideanSpace(MetricSpace):
    kind = "euclidean"


@dataclass(frozen=True)
class LaplacianSpace(MetricSpace):
    """Graph Laplacians ``L = D - A`` of ``dim``-node weighted graphs, Frobenius metric."""

    kind = "laplacian"

    @property
    def point_shape(self):
        return (self.dim, self.dim)

    def _check_point(self, a):
        a = self._check_shape(a)
        scale = max(1.0, float(np.max(np.abs(a))))
        if np.max(np.abs(a - a.T)) > STRUCTURE_TOL * scale:
            raise InvalidPointError("Laplacian must be symmetric")
        if np.max(np.abs(a.sum(axis=1))) > STRUCTURE_TOL * scale * self.dim:
            raise InvalidPointError("Laplacian rows must sum to zero")
        off = a[~np.eye(self.dim, dtype=bool)]
        if off.size and np.max(off) > STRUCTURE_TOL * scale:
            raise InvalidPointError("Laplacian off-diagonal entries must be <= 0")

    def validate(self, a):
        self._check_point(a)
        return _frozen(a)


@dataclass(frozen=True)
class Wasserstein1DSpace(MetricSpace):
    """Univariate distributions as quantile functions on ``dim`` mid-levels.

    ``W2(a, b)`` is the root-mean-square difference of the quantile vectors,
    and weighted barycenters are weighted averages of quantile vectors.
    """

    dim: int = 100
    kind = "wasserstein1d"

    @property
    def levels(self):
        return quantile_levels(self.dim)

    def sqdist_many(self, points, targets):
        diff = np.asarray(points, dtype=float) - np.asarray(targets, dtype=float)
        return np.mean(diff * diff, axis=-1)

    def _check_point(self, a):
        a = self._check_shape(a)
        if np.any(np.diff(a) < 0):
            raise InvalidPointError("quantile function must be nondecreasing")

    def validate(self, a):
        self._check_point(a)
        return _frozen(a)


@dataclass(frozen=True)
class SphereSpace(MetricSpace):
    """Unit sphere in ``R^dim`` with the geodesic distance.

    Weighted means are computed by Riemannian gradient descent with exact
    exponential and logarithm maps, started from the normalized extrinsic
    mean; each step has unit length along the tangent mean of the
    logarithms and is halved until the objective does not increase.

    ``restarts > 0`` additionally starts the solver from the ``restarts``
    highest-weight data points and warns with :class:`MultimodalMeanWarning`
    if any run lands more than ``10 * tolerance`` away from the first.
    """

    restarts: int = 0
    kind = "sphere"
    closed_form = False

    def __post_init__(self):
        super().__post_init__()
        if self.dim < 2:
            raise InputError("sphere dimension must be >= 2")

    def _check_point(self, a):
        a = self._check_shape(a)
        if abs(math.sqrt(float(a @ a)) - 1.0) > UNIT_NORM_TOL:
            raise InvalidPointError("sphere point must have unit norm")

    def validate(self, a):
        self._check_point(a)
        return _frozen(a)

    def sqdist_many(self, points, targets):
        y = np.asarray(points, dtype=float)
        x = np.asarray(targets, dtype=float)
        c = np.sum(y * x, axis=-1)
        if np.any(np.abs(c) > 1.0 + UNIT_NORM_TOL):
            raise InvalidPointError("inner product outside [-1, 1]; points are not on the sphere")
        s = np.linalg.norm(y - c[..., None] * x, axis=-1)
        return np.arctan2(s, c) ** 2

    def _weighted_mean(self, pts, w):
        pts = np.ascontiguousarray(pts)
        keep = w > 0
        pts, w = np.ascontiguousarray(pts[keep]), np.ascontiguousarray(w[keep])
        x, f, gn, status, _ = kernels.sphere_mean(pts, w, self.tolerance, self.max_iterations)
        self._raise_for(status, x, gn)
        if self.restarts:
            for i in np.argsort(-w, kind="stable")[: self.restarts]:
                xr, _, gr, st, _ = kernels.sphere_mean(
                    pts, w, self.tolerance, self.max_iterations, pts[i]
                )
                self._raise_for(st, xr, gr)
                if self.sqdist_many(x, xr) > (10 * self.tolerance) ** 2:
                    warnings.warn(
                        "spherical mean is not unique: restarted solves disagree",
                        MultimodalMeanWarning,
                        stacklevel=3,
                    )
                    break
        return _frozen(x)

    def _raise_for(self, status, x, gn, **context):
        if status == DEGENERATE:
            raise DegenerateConfigurationError(
                "weighted extrinsic mean is zero; the spherical mean is not unique"
            )
        if status == NOT_CONVERGED:
            raise ConvergenceError(
                f"spherical mean did not converge within {self.max_iterations} iterations",
                last_iterate=np.array(x),
                gap=float(gn),
                context=context,
            )

    def group_means(self, points, order, offsets):
        pts = np.ascontiguousarray(points, dtype=float)
        means, sq, status, gnorm = kernels.sphere_group_means(
            pts,
            np.ascontiguousarray(order, dtype=np.intp),
            np.ascontiguousarray(offsets, dtype=np.intp),
            self.tolerance,
            self.max_iterations,
        )
        bad = np.flatnonzero(status)
        if bad.size:
            g = int(bad[0])
            self._raise_for(int(status[g]), means[g], gnorm[g], phase=g + 1)
        # the iteration can land a few ulps off a repeated point; snap back
        order = np.asarray(order)
        counts = np.diff(offsets)
        identical, refs = _identical_groups(pts[order], counts, np.asarray(offsets[:-1]))
        if identical.any():
            means[identical] = refs[identical]
            sq[order[np.repeat(identical, counts)]] = 0.0
        return means, sq


_SPACES = {
    cls.kind: cls for cls in (SphereSpace, LaplacianSpace, Wasserstein1DSpace, EuclideanSpace)
}


def make_space(kind, dim, **settings):
    """Build a space by its ``kind`` name (see :data:`SPACE_KINDS`)."""
    try:
        cls = _SPACES[kind]
    except KeyError:
        raise InputError(f"unknown space kind {kind!r}; expected one of {SPACE_KINDS}") from None
    return cls(dim=dim, **settings)


def distance(space, a, b):
    """Distance between two points of ``space``."""
    return space.distance(a, b)


def frechet_mean(space, points, weights=None):
    """Minimizer of ``sum_i w_i d^2(points[i], .)`` over ``space``."""
    return space.frechet_mean(points, weights)


def sqrt_compositional_transform(composition):
    """Map a composition (nonnegative parts summing to 1) onto the unit sphere.

    Parts below ``1e-12`` in absolute value are treated as exact zeros.

    >>> sqrt_compositional_transform([0.25, 0.25, 0.5]).round(6)
    array([0.5     , 0.5     , 0.707107])
    """
    x = np.asarray(composition, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise InvalidCompositionError("composition must be a vector with at least 2 parts")
    if not np.all(np.isfinite(x)):
        raise InvalidCompositionError("composition has non-finite parts")
    if np.any(x < -ZERO_PART_TOL):
        raise InvalidCompositionError("composition has negative parts")
    if abs(x.sum() - 1.0) > COMPOSITION_TOL:
        raise InvalidCompositionError(f"composition sums to {x.sum():.12g}, not 1")
    return _frozen(np.sqrt(np.clip(x, 0.0, None)))


def laplacian_from_adjacency(adjacency):
    """Graph Laplacian ``D - A`` of a symmetric nonnegative adjacency matrix."""
    a = np.asarray(adjacency, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidAdjacencyError(f"adjacency must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidAdjacencyError("adjacency has non-finite entries")
    if a.size and np.max(np.abs(a - a.T)) > STRUCTURE_TOL:
        raise InvalidAdjacencyError("adjacency must be symmetric")
    if np.any(a < 0):
        raise InvalidAdjacencyError("adjacency weights must be nonnegative")
    if np.any(np.diag(a) != 0):
        raise InvalidAdjacencyError("adjacency must have a zero diagonal")
    a = 0.5 * (a + a.T)
    return _frozen(np.diag(a.sum(axis=1)) - a)


def quantile_levels(m):
    """Mid-point quantile levels ``(k - 0.5) / m`` for ``k = 1..m``."""
    return (np.arange(1, m + 1) - 0.5) / m
