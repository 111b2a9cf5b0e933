"""Compiled and NumPy backends must agree."""

import numpy as np
import pytest

from objper import _fallback
from objper._backend import BACKEND, OK

from conftest import random_sphere_points

compiled = pytest.importorskip("objper._kernels")


@pytest.mark.parametrize("n", [1, 2, 5, 40])
def test_sphere_mean_matches_fallback(rng, n):
    for _ in range(20):
        pts = random_sphere_points(rng, n, p=int(rng.integers(2, 7)))
        w = rng.random(n) + 0.1
        w /= w.sum()
        a = compiled.sphere_mean(pts, w, 1e-10, 200)
        b = _fallback.sphere_mean(pts, w, 1e-10, 200)
        assert a[3] == b[3] == OK
        np.testing.assert_allclose(a[0], b[0], atol=1e-12)
        assert a[1] == pytest.approx(b[1], rel=1e-10, abs=1e-15)


def test_warm_start_matches_fallback(rng):
    pts = random_sphere_points(rng, 10)
    w = np.full(10, 0.1)
    x0 = pts[3]
    a = compiled.sphere_mean(pts, w, 1e-10, 200, x0)
    b = _fallback.sphere_mean(pts, w, 1e-10, 200, x0)
    np.testing.assert_allclose(a[0], b[0], atol=1e-12)
    assert a[4] == b[4]


def test_group_means_match_fallback(rng):
    T, theta = 97, 8
    pts = random_sphere_points(rng, T, p=4)
    phases = np.arange(T) % theta
    order = np.argsort(phases, kind="stable").astype(np.intp)
    offsets = np.concatenate([[0], np.cumsum(np.bincount(phases))]).astype(np.intp)
    a = compiled.sphere_group_means(pts, order, offsets, 1e-10, 200)
    b = _fallback.sphere_group_means(pts, order, offsets, 1e-10, 200)
    np.testing.assert_allclose(a[0], b[0], atol=1e-12)
    np.testing.assert_allclose(a[1], b[1], atol=1e-14)
    assert np.array_equal(a[2], b[2])


def test_degenerate_and_cap_status_codes():
    antipodal = np.array([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
    w = np.array([0.5, 0.5])
    for k in (compiled, _fallback):
        assert k.sphere_mean(antipodal, w, 1e-10, 200)[3] == 2
        # (1,1,1)/sqrt(3) is the start and the answer, so perturb one weight
        far = np.eye(3)
        assert k.sphere_mean(far, np.array([0.5, 0.3, 0.2]), 1e-14, 1)[3] == 1


def test_backend_is_reported():
    assert BACKEND in ("compiled", "python")


def test_backend_override(monkeypatch):
    import importlib

    import objper._backend as backend

    monkeypatch.setenv("OBJPER_BACKEND", "python")
    try:
        importlib.reload(backend)
        assert backend.BACKEND == "python"
        assert backend.kernels is _fallback
    finally:
        monkeypatch.delenv("OBJPER_BACKEND")
        importlib.reload(backend)
