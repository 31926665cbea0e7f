"""Time the compiled kernels against the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from landau_toeplitz import _kernels_py

try:
    from landau_toeplitz import _kernels
except ImportError:
    _kernels = None


def cases():
    rng = np.random.default_rng(0)
    d = np.sort(rng.standard_normal(400))[::-1] * np.geomspace(1.0, 1e-40, 400)
    e = 0.1 * np.abs(d[:-1] * d[1:]) ** 0.5
    return {
        "log_quad gaussian k=200": lambda m: m.log_quad(200.0, 2.0, 1.0, 0.0, np.inf, 0, 0, 200.0),
        "log_quad beta=0.5 k=2000": lambda m: m.log_quad(2000.0, 0.5, 0.5, 0.0, np.inf, 1, 1, 1999.0),
        "log_quad disk k=150": lambda m: m.log_quad(150.0, 0.0, 1.0, 0.0, 2.0, 2, 2, 148.0),
        "laguerre_eval n=50 (1e4 pts)": lambda m: m.laguerre_eval(50, 1.5, np.linspace(0, 40, 10_000)),
        "tridiag_eigvalsh n=400": lambda m: m.tridiag_eigvalsh(d, e),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'case':34s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}")
    for name, fn in cases().items():
        t_py = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat)) * 1e3
        if _kernels is None:
            print(f"{name:34s} {t_py:12.3f} {'n/a':>12s} {'':>8s}")
            continue
        t_cy = min(timeit.repeat(lambda: fn(_kernels), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:34s} {t_py:12.3f} {t_cy:12.3f} {t_py / t_cy:8.1f}x")


if __name__ == "__main__":
    main()
