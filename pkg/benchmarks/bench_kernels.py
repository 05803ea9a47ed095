#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Run after installing the package:

    python benchmarks/bench_kernels.py

The workloads mirror real usage: LCS over token-id sequences the length of
clinical summaries/notes, and rank iteration over sentence graphs the size
of long documents.
"""
from __future__ import annotations

import random
import time

from medtextkit._kernels import _pure

try:
    from medtextkit._kernels import _speedups
except ImportError:
    _speedups = None


def time_call(fn, *args, repeat: int = 5) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def lcs_case(rng: random.Random, n: int, m: int, vocab: int = 200):
    a = [rng.randrange(vocab) for _ in range(n)]
    b = [rng.randrange(vocab) for _ in range(m)]
    return a, b


def rank_case(rng: random.Random, n: int):
    weights = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.3:
                w = rng.uniform(0.05, 2.0)
                weights[i][j] = w
                weights[j][i] = w
    return weights


def main() -> int:
    rng = random.Random(7)
    rows = []

    for n, m in ((100, 150), (400, 500), (1000, 1200)):
        a, b = lcs_case(rng, n, m)
        pure_t = time_call(_pure.lcs_length, a, b)
        if _speedups is not None:
            fast_t = time_call(_speedups.lcs_length, a, b)
            assert _speedups.lcs_length(a, b) == _pure.lcs_length(a, b)
        else:
            fast_t = None
        rows.append((f"lcs_length {n}x{m}", pure_t, fast_t))

    for n in (50, 150, 300):
        weights = rank_case(rng, n)
        pure_t = time_call(_pure.rank_scores, weights, 0.85, 1e-4, 100)
        if _speedups is not None:
            fast_t = time_call(_speedups.rank_scores, weights, 0.85, 1e-4, 100)
        else:
            fast_t = None
        rows.append((f"rank_scores n={n}", pure_t, fast_t))

    print(f"{'workload':<24} {'pure (ms)':>12} {'compiled (ms)':>14} {'speedup':>9}")
    for name, pure_t, fast_t in rows:
        if fast_t is None:
            print(f"{name:<24} {pure_t * 1e3:>12.2f} {'n/a':>14} {'n/a':>9}")
        else:
            print(
                f"{name:<24} {pure_t * 1e3:>12.2f} {fast_t * 1e3:>14.2f} "
                f"{pure_t / fast_t:>8.1f}x"
            )
    if _speedups is None:
        print("\ncompiled kernel not built; showing pure-Python timings only")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
