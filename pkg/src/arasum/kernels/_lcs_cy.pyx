# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled longest-common-subsequence length over int64 id arrays."""

import numpy as np

cimport numpy as cnp


def lcs_length_ids(cnp.int64_t[::1] a, cnp.int64_t[::1] b):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[0]
    if n == 0 or m == 0:
        return 0
    cdef cnp.int64_t[::1] prev = np.zeros(m + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] cur = np.zeros(m + 1, dtype=np.int64)
    cdef Py_ssize_t i, j
    cdef cnp.int64_t ai, best
    for i in range(1, n + 1):
        ai = a[i - 1]
        cur[0] = 0
        for j in range(1, m + 1):
            if ai == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                best = prev[j]
                if cur[j - 1] > best:
                    best = cur[j - 1]
                cur[j] = best
        prev, cur = cur, prev
    return int(prev[m])
