# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False, language_level=3
"""Compiled Bregman distance kernels.

Both kernels take pre-linked coordinates together with generator values and
(for the second operand) gradients, so they work for any generator:

    B(a, b) = F(a) - F(b) - sum_t (a_t - b_t) * grad F(b)_t
"""

import numpy as np


def pairwise_bregman(const double[:, ::1] A, const double[::1] FA,
                     const double[:, ::1] B, const double[::1] FB,
                     const double[:, ::1] GB):
    cdef Py_ssize_t n = A.shape[0], m = B.shape[0], d = A.shape[1]
    cdef Py_ssize_t i, j, t
    cdef double s
    out = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(n):
            for j in range(m):
                s = 0.0
                for t in range(d):
                    s = s + (A[i, t] - B[j, t]) * GB[j, t]
                o[i, j] = FA[i] - FB[j] - s
    return out


def assign_nearest(const double[:, ::1] X, const double[::1] FX,
                   const double[:, ::1] C, const double[::1] FC,
                   const double[:, ::1] GC):
    cdef Py_ssize_t n = X.shape[0], k = C.shape[0], d = X.shape[1]
    cdef Py_ssize_t i, j, t, best
    cdef double s, dist, best_dist
    labels = np.empty(n, dtype=np.intp)
    dists = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t[::1] lab = labels
    cdef double[::1] dst = dists
    with nogil:
        for i in range(n):
            best = 0
            best_dist = 0.0
            for j in range(k):
                s = 0.0
                for t in range(d):
                    s = s + (X[i, t] - C[j, t]) * GC[j, t]
                dist = FX[i] - FC[j] - s
                # strict comparison: ties keep the lowest cluster index
                if j == 0 or dist < best_dist:
                    best = j
                    best_dist = dist
            lab[i] = best
            dst[i] = best_dist
    return labels, dists
