import numpy as np
import pytest

from objper import EuclideanSpace, ObjectSeries


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_sphere_points(rng, n, p=3, spread=0.4):
    """Points scattered around a random direction in the positive orthant."""
    centre = np.abs(rng.standard_normal(p)) + 0.5
    centre /= np.linalg.norm(centre)
    pts = centre + spread * rng.standard_normal((n, p))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def periodic_euclidean(pattern, T):
    pattern = np.asarray(pattern, dtype=float).reshape(len(pattern), -1)
    pts = pattern[np.arange(T) % len(pattern)]
    return ObjectSeries(EuclideanSpace(pts.shape[1]), pts)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
