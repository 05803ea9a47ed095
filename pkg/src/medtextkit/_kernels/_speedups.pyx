# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels (LCS length, rank iteration).

Mirrors _pure.py operation-for-operation; see that module for semantics.
"""
import numpy as np

BACKEND = "compiled"


def lcs_length(a, b):
    """Length of the longest common subsequence of two id sequences."""
    cdef long[::1] av
    cdef long[::1] bv
    if len(a) == 0 or len(b) == 0:
        return 0
    if len(b) > len(a):
        a, b = b, a
    av = np.ascontiguousarray(a, dtype=np.int64)
    bv = np.ascontiguousarray(b, dtype=np.int64)
    cdef Py_ssize_t na = av.shape[0]
    cdef Py_ssize_t nb = bv.shape[0]
    cdef long[::1] prev = np.zeros(nb + 1, dtype=np.int64)
    cdef long[::1] curr = np.zeros(nb + 1, dtype=np.int64)
    cdef Py_ssize_t i, j
    cdef long x, up, left
    for i in range(na):
        x = av[i]
        curr[0] = 0
        for j in range(1, nb + 1):
            if x == bv[j - 1]:
                curr[j] = prev[j - 1] + 1
            else:
                left = curr[j - 1]
                up = prev[j]
                curr[j] = left if left >= up else up
        prev, curr = curr, prev
    return int(prev[nb])


def rank_scores(weights, double damping, double tolerance, int max_iterations):
    """Weighted-PageRank fixed-point iteration over a symmetric weight matrix."""
    cdef double[:, ::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t n = w.shape[0]
    cdef double[::1] out = np.zeros(n, dtype=np.float64)
    cdef double[::1] scores = np.ones(n, dtype=np.float64)
    cdef double[::1] new_scores = np.zeros(n, dtype=np.float64)
    cdef Py_ssize_t i, j, it
    cdef double total, acc, delta, wji
    cdef double base = 1.0 - damping
    for j in range(n):
        total = 0.0
        for i in range(n):
            total += w[j, i]
        out[j] = total
    for it in range(max_iterations):
        for i in range(n):
            acc = 0.0
            for j in range(n):
                if out[j] > 0.0:
                    wji = w[j, i]
                    if wji > 0.0:
                        acc += wji / out[j] * scores[j]
            new_scores[i] = base + damping * acc
        delta = 0.0
        for i in range(n):
            delta += abs(new_scores[i] - scores[i])
        scores, new_scores = new_scores, scores
        if delta < tolerance:
            break
    return [scores[i] for i in range(n)]
