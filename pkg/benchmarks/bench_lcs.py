"""Benchmark the compiled LCS kernel against the pure-Python fallback.

The LCS dynamic program behind ROUGE-L is the only genuinely
Python-bound hot loop in the evaluation path; everything else in the
package is numpy-vectorized.  Usage:

    python3 benchmarks/bench_lcs.py [--sizes 32 128 512] [--repeats 20]
"""

import argparse
import random
import time

from arasum import kernels
from arasum.kernels._lcs_py import lcs_length as lcs_py


def bench(fn, cases, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for a, b in cases:
            fn(a, b)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[32, 128, 512])
    ap.add_argument("--cases", type=int, default=20)
    ap.add_argument("--repeats", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"active backend: {kernels.BACKEND}")
    print(f"{'tokens':>8} {'python (ms)':>12} {'compiled (ms)':>14} {'speedup':>8}")
    rng = random.Random(args.seed)
    for n in args.sizes:
        cases = []
        for _ in range(args.cases):
            a = [rng.choice("abcdefghij") for _ in range(n)]
            b = [rng.choice("abcdefghij") for _ in range(n)]
            cases.append((a, b))
            assert kernels.lcs_length(a, b) == lcs_py(a, b)
        t_py = bench(lcs_py, cases, args.repeats)
        t_ker = bench(kernels.lcs_length, cases, args.repeats)
        print(f"{n:>8} {1e3 * t_py:>12.2f} {1e3 * t_ker:>14.2f} "
              f"{t_py / t_ker:>7.1f}x")


if __name__ == "__main__":
    main()
