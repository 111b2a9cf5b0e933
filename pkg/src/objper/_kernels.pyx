# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for spherical Fréchet means.

Mirrors ``objper._fallback`` exactly in algorithm and status codes; the
Python layer picks one of the two at import time.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, atan2, cos, sin, fabs
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef enum:
    MAX_HALVINGS = 60

cdef enum:
    OK = 0
    NOT_CONVERGED = 1
    DEGENERATE = 2


cdef inline double _sqdist(const double* y, const double* x, Py_ssize_t p) noexcept nogil:
    cdef double c = 0.0, s = 0.0, r
    cdef Py_ssize_t j
    for j in range(p):
        c += y[j] * x[j]
    for j in range(p):
        r = y[j] - c * x[j]
        s += r * r
    r = atan2(sqrt(s), c)
    return r * r


cdef double _objective(const double* Y, const Py_ssize_t* idx, const double* w,
                       Py_ssize_t n, Py_ssize_t p, const double* x) noexcept nogil:
    cdef double f = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        f += w[i] * _sqdist(Y + idx[i] * p, x, p)
    return f


cdef int _karcher(const double* Y, const Py_ssize_t* idx, const double* w,
                  Py_ssize_t n, Py_ssize_t p, double tol, int max_iter,
                  double* x, double* v, double* xn,
                  double* out_f, double* out_g, int* out_it, int use_x0) noexcept nogil:
    # w must sum to 1; x, v, xn are caller-owned scratch of length p.
    # With use_x0 the caller has written the start point into x.
    cdef Py_ssize_t i, j, k, h
    cdef const double* y
    cdef double nrm, c, s, r, th, f, fn, gn, step, a, b
    cdef int accepted

    if not use_x0:
        for j in range(p):
            x[j] = 0.0
        for i in range(n):
            y = Y + idx[i] * p
            for j in range(p):
                x[j] += w[i] * y[j]
    nrm = 0.0
    for j in range(p):
        nrm += x[j] * x[j]
    nrm = sqrt(nrm)
    out_it[0] = 0
    if nrm < 1e-12:
        out_f[0] = 0.0
        out_g[0] = 0.0
        return DEGENERATE
    for j in range(p):
        x[j] /= nrm
    f = _objective(Y, idx, w, n, p, x)

    for k in range(max_iter + 1):
        for j in range(p):
            v[j] = 0.0
        for i in range(n):
            y = Y + idx[i] * p
            c = 0.0
            for j in range(p):
                c += y[j] * x[j]
            s = 0.0
            for j in range(p):
                r = y[j] - c * x[j]
                s += r * r
            s = sqrt(s)
            if s <= 0.0:
                continue
            th = atan2(s, c)
            a = w[i] * th / s
            for j in range(p):
                v[j] += a * (y[j] - c * x[j])
        gn = 0.0
        for j in range(p):
            gn += v[j] * v[j]
        gn = sqrt(gn)
        out_f[0] = f
        out_g[0] = gn
        out_it[0] = <int>k
        if gn < tol:
            return OK
        if k == max_iter:
            break

        step = 1.0
        accepted = 0
        for h in range(MAX_HALVINGS):
            a = cos(step * gn)
            b = sin(step * gn) / gn
            nrm = 0.0
            for j in range(p):
                xn[j] = a * x[j] + b * v[j]
                nrm += xn[j] * xn[j]
            nrm = sqrt(nrm)
            for j in range(p):
                xn[j] /= nrm
            fn = _objective(Y, idx, w, n, p, xn)
            if fn <= f + 4.0 * 2.220446049250313e-16 * fabs(f):
                accepted = 1
                break
            step *= 0.5
        if not accepted:
            break
        for j in range(p):
            x[j] = xn[j]
        f = fn
    return NOT_CONVERGED


def sphere_mean(const double[:, ::1] points, const double[::1] weights,
                double tol, int max_iter, x0=None):
    """Weighted spherical mean of ``points`` (rows) with normalized ``weights``.

    Starts from ``x0`` when given, else from the normalized extrinsic mean.
    Returns ``(mean, objective, grad_norm, status, iterations)``.
    """
    cdef Py_ssize_t n = points.shape[0], p = points.shape[1], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x = np.empty(p)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v = np.empty(p)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xn = np.empty(p)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] idx = np.arange(n, dtype=np.intp)
    cdef double f = 0.0, g = 0.0
    cdef int it = 0, status, use_x0 = 0
    if x0 is not None:
        x[:] = x0
        use_x0 = 1
    with nogil:
        status = _karcher(&points[0, 0], <Py_ssize_t*>idx.data, &weights[0], n, p,
                          tol, max_iter, <double*>x.data, <double*>v.data,
                          <double*>xn.data, &f, &g, &it, use_x0)
    return x, f, g, status, it


def sphere_group_means(const double[:, ::1] points, const cnp.intp_t[::1] order,
                       const cnp.intp_t[::1] offsets, double tol, int max_iter):
    """Uniform-weight spherical means of row groups.

    Group ``l`` consists of rows ``order[offsets[l]:offsets[l + 1]]``.
    Returns ``(means, sqdist, status, grad_norm)`` where ``sqdist[t]`` is the
    squared geodesic distance of row ``t`` to its group mean.
    """
    cdef Py_ssize_t T = points.shape[0], p = points.shape[1]
    cdef Py_ssize_t G = offsets.shape[0] - 1, l, i, n, start
    cdef cnp.ndarray[cnp.float64_t, ndim=2] means = np.zeros((G, p))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sq = np.zeros(T)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] status = np.zeros(G, dtype=np.int32)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] gnorm = np.zeros(G)
    cdef double* w
    cdef double* scratch
    cdef double f, g
    cdef int it
    cdef const double* Y
    cdef const Py_ssize_t* od
    cdef double* M = <double*>means.data
    cdef double* SQ = <double*>sq.data
    cdef int* ST = <int*>status.data
    cdef double* GN = <double*>gnorm.data

    if T == 0 or G == 0:
        return means, sq, status, gnorm
    Y = &points[0, 0]
    od = <const Py_ssize_t*>&order[0]
    with nogil:
        w = <double*>malloc(T * sizeof(double))
        scratch = <double*>malloc(2 * p * sizeof(double))
        for l in range(G):
            start = offsets[l]
            n = offsets[l + 1] - start
            if n == 0:
                continue
            for i in range(n):
                w[i] = 1.0 / n
            ST[l] = _karcher(Y, od + start, w, n, p, tol, max_iter,
                             M + l * p, scratch, scratch + p, &f, &g, &it, 0)
            GN[l] = g
            for i in range(n):
                SQ[od[start + i]] = _sqdist(Y + od[start + i] * p, M + l * p, p)
        free(w)
        free(scratch)
    return means, sq, status, gnorm
