"""Time the oracle grid scan with the compiled kernel and the numpy fallback.

    python benchmarks/bench_oracle.py [--systems 500] [--grids 41,101,401] [--repeat 3]
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from filippov_lab import _oracle_py
from filippov_lab.canopy import bilinear_coeffs
from filippov_lab.pws_model import QuadCorners

try:
    from filippov_lab import _kernels
except ImportError:
    _kernels = None


def _time(fn, coefs, n, repeat):
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        for c in coefs:
            fn(c, n, 1e-12, 50)
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--systems", type=int, default=500)
    ap.add_argument("--grids", default="41,101,401")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    a = ap.parse_args()

    rng = np.random.default_rng(a.seed)
    coefs = [
        bilinear_coeffs(QuadCorners.from_xt(rng.uniform(-2, 2, (4, 2)))).as_array()
        for _ in range(a.systems)
    ]
    print(f"{a.systems} random systems, median of {a.repeat} runs")
    print(f"{'grid':>6} {'python [ms/sys]':>16} {'cython [ms/sys]':>16} {'speedup':>8}")
    for n in (int(g) for g in a.grids.split(",")):
        tp = _time(_oracle_py.scan_roots, coefs, n, a.repeat)
        if _kernels is None:
            print(f"{n:>6} {1e3 * tp / a.systems:>16.3f} {'n/a':>16} {'n/a':>8}")
            continue
        tc = _time(_kernels.scan_roots, coefs, n, a.repeat)
        print(f"{n:>6} {1e3 * tp / a.systems:>16.3f} {1e3 * tc / a.systems:>16.3f} {tp / tc:>7.1f}x")


if __name__ == "__main__":
    main()
