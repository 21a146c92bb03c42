"""Benchmark the JIT kernels against the pure-numpy fallbacks.

Times the two hot paths under each backend: coefficient subset enumeration
(2**(D/2 - 1) terms) and the segmented coprimality scan. Both backends must
produce identical values; this script asserts that while timing.

Usage: python benchmarks/bench_backends.py [--threads N]
"""

from __future__ import annotations

import argparse
import os
import time

BACKENDS = ("numba", "numpy")


def timed(fn, repeats=3):
    best = float("inf")
    value = None
    for _ in range(repeats):
        start = time.perf_counter()
        value = fn()
        best = min(best, time.perf_counter() - start)
    return value, best


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    args = parser.parse_args()

    from gapcensus import backend
    from gapcensus.gaps import _even_subset_sums
    from gapcensus.primes import primes_upto
    from gapcensus.sieve import SieveConfig, enumerate_coprime_gaps

    jobs = [
        (
            f"coefficients D={d} (2^{d // 2 - 1} subsets)",
            lambda d=d: _even_subset_sums(d, primes_upto(d // 2), threads=args.threads),
        )
        for d in (36, 44, 50)
    ] + [
        (
            f"sieve p={p} (scan to {p}#)",
            lambda p=p: enumerate_coprime_gaps(
                SieveConfig(p), threads=args.threads
            ).entries,
        )
        for p in (17, 19, 23)
    ]

    print(f"threads = {args.threads}\n")
    print(f"{'workload':44} {'numba':>10} {'numpy':>10} {'ratio':>7}")
    for label, fn in jobs:
        timings = {}
        results = {}
        for name in BACKENDS:
            os.environ[backend.BACKEND_ENV] = name
            if name == "numba":
                fn()  # warm the JIT before timing
            results[name], timings[name] = timed(fn)
        assert results["numba"] == results["numpy"], label
        ratio = timings["numpy"] / timings["numba"]
        print(
            f"{label:44} {timings['numba']:9.3f}s {timings['numpy']:9.3f}s "
            f"{ratio:6.1f}x"
        )


if __name__ == "__main__":
    main()
