# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan kernels.

Result-identical to ``minseq.kernels.fallback``: same summation order
(letter index ascending, squared components ascending), same strict-<
hit rule, eps == 0 meaning exact float equality.  Early exits only skip
work whose outcome is already decided, so they never change a verdict.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()


cdef inline double _letter_dist(const double[:, ::1] prefix, Py_ssize_t row,
                                const double[:, ::1] target, Py_ssize_t trow,
                                Py_ssize_t dim) nogil:
    cdef double d, sq
    cdef Py_ssize_t c
    if dim == 1:
        return fabs(prefix[row, 0] - target[trow, 0])
    d = prefix[row, 0] - target[trow, 0]
    sq = d * d
    for c in range(1, dim):
        d = prefix[row, c] - target[trow, c]
        sq = sq + d * d
    return sqrt(sq)


def hits_scan(const double[:, ::1] prefix, const double[:, ::1] target, double eps):
    """0-based start positions whose block matches the target."""
    cdef Py_ssize_t n = prefix.shape[0]
    cdef Py_ssize_t dim = prefix.shape[1]
    cdef Py_ssize_t length = target.shape[0]
    cdef Py_ssize_t m = n - length + 1
    if m <= 0:
        return np.empty(0, dtype=np.int64)
    out = np.empty(m, dtype=np.int64)
    cdef long long[::1] out_v = out
    cdef Py_ssize_t count = 0
    cdef Py_ssize_t p, t, c
    cdef double acc, w
    cdef bint ok
    if eps == 0.0:
        for p in range(m):
            ok = True
            for t in range(length):
                for c in range(dim):
                    if prefix[p + t, c] != target[t, c]:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                out_v[count] = p
                count += 1
    else:
        for p in range(m):
            acc = 0.0
            w = 0.5
            for t in range(length):
                acc = acc + w * _letter_dist(prefix, p + t, target, t, dim)
                if acc >= eps:
                    break
                w = w * 0.5
            if acc < eps:
                out_v[count] = p
                count += 1
    return out[:count].copy()


def min_scan(const double[:, ::1] prefix, const double[:, ::1] target, Py_ssize_t skip=-1):
    """(min block distance, first argmin position), skipping one position."""
    cdef Py_ssize_t n = prefix.shape[0]
    cdef Py_ssize_t dim = prefix.shape[1]
    cdef Py_ssize_t length = target.shape[0]
    cdef Py_ssize_t m = n - length + 1
    cdef double best = np.inf
    cdef Py_ssize_t best_pos = -1
    cdef Py_ssize_t p, t
    cdef double acc, w
    cdef bint abandoned
    if m <= 0:
        return float("inf"), -1
    for p in range(m):
        if p == skip:
            continue
        acc = 0.0
        w = 0.5
        abandoned = False
        for t in range(length):
            acc = acc + w * _letter_dist(prefix, p + t, target, t, dim)
            if acc >= best:
                abandoned = True
                break
            w = w * 0.5
        if not abandoned and acc < best:
            best = acc
            best_pos = p
    return float(best), int(best_pos)
