# cython: language_level=3
"""Compiled inner loops for swap evaluation and subset enumeration.

All distance arrays are facility-major: row ``f`` holds the distances from
facility ``f`` to every client.  Signatures match ``_kernels_py`` exactly.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()

ctypedef cnp.intp_t intp


def nearest_two(const double[:, ::1] rows):
    """Nearest and second-nearest row per client; ties go to the lower row."""
    cdef Py_ssize_t k = rows.shape[0], n = rows.shape[1], c, s
    cdef double x, b1, b2
    cdef intp i1, i2
    near = np.empty(n, dtype=np.intp)
    second = np.empty(n, dtype=np.intp)
    d1 = np.empty(n, dtype=np.float64)
    d2 = np.empty(n, dtype=np.float64)
    cdef intp[::1] near_v = near, second_v = second
    cdef double[::1] d1_v = d1, d2_v = d2
    for c in range(n):
        b1 = INFINITY
        b2 = INFINITY
        i1 = -1
        i2 = -1
        for s in range(k):
            x = rows[s, c]
            if x < b1:
                b2 = b1
                i2 = i1
                b1 = x
                i1 = s
            elif x < b2:
                b2 = x
                i2 = s
        near_v[c] = i1
        second_v[c] = i2
        d1_v[c] = b1
        d2_v[c] = b2
    return near, d1, second, d2


def swap_deltas(const double[:, ::1] cand, const double[::1] d1,
                const double[::1] d2, const intp[::1] slot, Py_ssize_t k):
    """Cost change of replacing center ``o`` (row) by candidate ``j`` (column)."""
    cdef Py_ssize_t b = cand.shape[0], n = cand.shape[1], j, c, o
    cdef double x, a, e
    out = np.zeros((k, b), dtype=np.float64)
    cdef double[:, ::1] out_v = out
    for j in range(b):
        a = 0.0
        for c in range(n):
            x = cand[j, c]
            if x < d1[c]:
                a += x - d1[c]
            else:
                e = (x if x < d2[c] else d2[c]) - d1[c]
                out_v[slot[c], j] += e
        for o in range(k):
            out_v[o, j] += a
    return out


def subset_costs(const double[:, ::1] dist_t, const intp[:, ::1] combos):
    """k-median cost of every row of ``combos``."""
    cdef Py_ssize_t B = combos.shape[0], k = combos.shape[1]
    cdef Py_ssize_t n = dist_t.shape[1], b, c, s
    cdef double total, best, x
    out = np.empty(B, dtype=np.float64)
    cdef double[::1] out_v = out
    for b in range(B):
        total = 0.0
        for c in range(n):
            best = INFINITY
            for s in range(k):
                x = dist_t[combos[b, s], c]
                if x < best:
                    best = x
            total += best
        out_v[b] = total
    return out
