"""Compare the compiled spherical-mean kernels with the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Times three workloads per backend: one weighted mean of 20 points, the
per-phase means of a T=240 series at theta=12, and a full scan over
theta = 1..62. Results must agree; the script checks that before timing.
"""

import argparse
import timeit

import numpy as np

import objper.spaces
from objper import _fallback, scan
from objper import simulation as sim

try:
    from objper import _kernels as compiled
except ImportError:
    compiled = None


def _series():
    return sim.generate(sim.DirichletConfig(T=240, alpha=0.5, seed=1))


def workloads(k):
    series = _series()
    pts = np.ascontiguousarray(series.points)
    w = np.full(20, 1 / 20)
    phases = np.arange(240) % 12
    order = np.argsort(phases, kind="stable").astype(np.intp)
    offsets = np.concatenate([[0], np.cumsum(np.bincount(phases))]).astype(np.intp)

    def full_scan():
        objper.spaces.kernels = k
        return scan(series, keep_barycenters=False).rss

    return {
        "mean of 20 points": lambda: k.sphere_mean(pts[:20], w, 1e-10, 200),
        "12 phase means, T=240": lambda: k.sphere_group_means(pts, order, offsets, 1e-10, 200),
        "scan theta=1..62, T=240": full_scan,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if compiled is None:
        print("compiled extension not built; only the fallback is available")
    backends = {"python": _fallback} | ({"compiled": compiled} if compiled else {})
    original = objper.spaces.kernels
    try:
        if compiled:
            a = workloads(compiled)["scan theta=1..62, T=240"]()
            b = workloads(_fallback)["scan theta=1..62, T=240"]()
            np.testing.assert_allclose(a, b, rtol=1e-10)
        rows = {}
        for name, k in backends.items():
            for label, fn in workloads(k).items():
                n, _ = timeit.Timer(fn).autorange()
                best = min(timeit.repeat(fn, number=n, repeat=args.repeat)) / n
                rows.setdefault(label, {})[name] = best
    finally:
        objper.spaces.kernels = original
    print(f"{'workload':26s} {'python':>12s} {'compiled':>12s} {'speedup':>8s}")
    for label, t in rows.items():
        c = t.get("compiled")
        cs = f"{c * 1e3:10.3f}ms" if c else f"{'-':>12s}"
        sp = f"{t['python'] / c:7.1f}x" if c else f"{'-':>8s}"
        print(f"{label:26s} {t['python'] * 1e3:10.3f}ms {cs} {sp}")


if __name__ == "__main__":
    main()
