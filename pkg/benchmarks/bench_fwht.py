#!/usr/bin/env python3
"""Benchmark the compiled butterfly kernel against the numpy fallback.

Usage: python benchmarks/bench_fwht.py [--max-n 20] [--repeats 5]
"""

import argparse
import time

import numpy as np

from cubespectral._kernels import BACKEND, fallback

try:
    from cubespectral._kernels import _butterfly as compiled
except ImportError:
    compiled = None


def time_kernel(fn, n, repeats):
    data = np.random.default_rng(0).standard_normal((1 << n, 1)) + 0j
    best = float("inf")
    for _ in range(repeats):
        work = np.ascontiguousarray(data.copy())
        t0 = time.perf_counter()
        fn(work)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--max-n", type=int, default=20)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    print(f"active backend: {BACKEND}")
    header = f"{'n':>4} {'numpy (ms)':>12}"
    if compiled is not None:
        header += f" {'compiled (ms)':>14} {'speedup':>8}"
    print(header)
    for n in range(12, args.max_n + 1, 2):
        t_numpy = time_kernel(fallback.fwht_inplace, n, args.repeats)
        row = f"{n:>4} {t_numpy * 1e3:>12.2f}"
        if compiled is not None:
            t_comp = time_kernel(compiled.fwht_inplace, n, args.repeats)
            row += f" {t_comp * 1e3:>14.2f} {t_numpy / t_comp:>8.2f}x"
        print(row)


if __name__ == "__main__":
    main()
