"""Pure NumPy implementation of the compiled spherical-mean kernels.

Same algorithm, argument order and status codes as ``objper._kernels``.
"""

import numpy as np

OK, NOT_CONVERGED, DEGENERATE = 0, 1, 2
MAX_HALVINGS = 60
_EPS = np.finfo(float).eps


def _sqdist(Y, x):
    c = Y @ x
    s = np.sqrt(np.sum((Y - c[:, None] * x) ** 2, axis=1))
    return np.arctan2(s, c) ** 2


def _karcher(Y, w, tol, max_iter, x0=None):
    x = w @ Y if x0 is None else np.array(x0, dtype=float)
    nrm = np.sqrt(x @ x)
    if nrm < 1e-12:
        return x, 0.0, 0.0, DEGENERATE, 0
    x = x / nrm
    f = float(w @ _sqdist(Y, x))
    for k in range(max_iter + 1):
        c = Y @ x
        perp = Y - c[:, None] * x
        s = np.sqrt(np.sum(perp**2, axis=1))
        safe = s > 0.0
        coef = np.zeros_like(s)
        coef[safe] = w[safe] * np.arctan2(s[safe], c[safe]) / s[safe]
        v = coef @ perp
        gn = float(np.sqrt(v @ v))
        if gn < tol:
            return x, f, gn, OK, k
        if k == max_iter:
            break
        step = 1.0
        for _ in range(MAX_HALVINGS):
            xn = np.cos(step * gn) * x + (np.sin(step * gn) / gn) * v
            xn = xn / np.sqrt(xn @ xn)
            fn = float(w @ _sqdist(Y, xn))
            if fn <= f + 4.0 * _EPS * abs(f):
                break
            step *= 0.5
        else:
            break
        x, f = xn, fn
    return x, f, gn, NOT_CONVERGED, k


def sphere_mean(points, weights, tol, max_iter, x0=None):
    """Weighted spherical mean; returns ``(mean, objective, grad_norm, status, iterations)``."""
    points = np.ascontiguousarray(points, dtype=float)
    weights = np.ascontiguousarray(weights, dtype=float)
    return _karcher(points, weights, tol, max_iter, x0)


def sphere_group_means(points, order, offsets, tol, max_iter):
    """Uniform-weight spherical means of the row groups ``order[offsets[l]:offsets[l+1]]``."""
    points = np.ascontiguousarray(points, dtype=float)
    T, p = points.shape
    G = len(offsets) - 1
    means = np.zeros((G, p))
    sq = np.zeros(T)
    status = np.zeros(G, dtype=np.int32)
    gnorm = np.zeros(G)
    for g in range(G):
        members = order[offsets[g]:offsets[g + 1]]
        n = len(members)
        if n == 0:
            continue
        Y = points[members]
        x, _, gn, st, _ = _karcher(Y, np.full(n, 1.0 / n), tol, max_iter)
        means[g], status[g], gnorm[g] = x, st, gn
        sq[members] = _sqdist(Y, x)
    return means, sq, status, gnorm
