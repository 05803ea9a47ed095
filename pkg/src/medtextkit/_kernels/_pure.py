"""Pure-Python implementations of the hot kernels.

Used when the compiled extension is unavailable (or disabled via the
MEDTEXTKIT_PURE_PYTHON environment variable). Semantics are identical to
the compiled versions; only speed differs.
"""
from __future__ import annotations

from typing import Sequence

BACKEND = "python"


def lcs_length(a: Sequence[int], b: Sequence[int]) -> int:
    """Length of the longest common subsequence of two id sequences."""
    if not a or not b:
        return 0
    if len(b) > len(a):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        curr = [0] * (len(b) + 1)
        for j, y in enumerate(b, start=1):
            if x == y:
                curr[j] = prev[j - 1] + 1
            else:
                curr[j] = curr[j - 1] if curr[j - 1] >= prev[j] else prev[j]
        prev = curr
    return prev[-1]


def rank_scores(
    weights: Sequence[Sequence[float]],
    damping: float,
    tolerance: float,
    max_iterations: int,
) -> list[float]:
    """Weighted-PageRank fixed-point iteration over a symmetric weight matrix.

    Starts every score at 1.0 and iterates
        s[i] <- (1 - d) + d * sum_j (w[j][i] / out[j]) * s[j]
    over neighbors with positive out-weight until the L1 change drops below
    ``tolerance`` or ``max_iterations`` is hit.
    """
    n = len(weights)
    out = [0.0] * n
    for j in range(n):
        row = weights[j]
        total = 0.0
        for k in range(n):
            total += row[k]
        out[j] = total
    scores = [1.0] * n
    base = 1.0 - damping
    for _ in range(max_iterations):
        new_scores = [0.0] * n
        for i in range(n):
            acc = 0.0
            for j in range(n):
                if out[j] > 0.0:
                    w = weights[j][i]
                    if w > 0.0:
                        acc += w / out[j] * scores[j]
            new_scores[i] = base + damping * acc
        delta = 0.0
        for i in range(n):
            delta += abs(new_scores[i] - scores[i])
        scores = new_scores
        if delta < tolerance:
            break
    return scores
