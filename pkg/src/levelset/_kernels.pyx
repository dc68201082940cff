# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for polynomial evaluation and monomial accumulation.

Both functions mirror :mod:`levelset._kernels_py` exactly in signature and in
the sign-symmetry guarantees the quadrature relies on: a monomial of odd degree
in coordinate ``j`` changes sign bit-exactly when ``x_j`` is negated.
"""
import numpy as np


cdef inline void _powers(const double[:, ::1] points, Py_ssize_t i,
                         double[:, ::1] pw, Py_ssize_t maxdeg) noexcept nogil:
    cdef Py_ssize_t j, k
    cdef double x
    for j in range(points.shape[1]):
        x = points[i, j]
        pw[j, 0] = 1.0
        for k in range(1, maxdeg + 1):
            pw[j, k] = pw[j, k - 1] * x


def poly_eval(const double[:, ::1] points, const long long[:, ::1] exps,
              const double[::1] coeffs):
    """Evaluate ``sum_t coeffs[t] * x**exps[t]`` at every row of ``points``."""
    cdef Py_ssize_t N = points.shape[0], n = points.shape[1], T = exps.shape[0]
    cdef Py_ssize_t i, j, t
    cdef Py_ssize_t maxdeg = 0
    for t in range(T):
        for j in range(n):
            if exps[t, j] > maxdeg:
                maxdeg = exps[t, j]
    out_arr = np.zeros(N, dtype=np.float64)
    pw_arr = np.empty((n, maxdeg + 1), dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double[:, ::1] pw = pw_arr
    cdef double acc, term
    with nogil:
        for i in range(N):
            _powers(points, i, pw, maxdeg)
            acc = 0.0
            for t in range(T):
                term = coeffs[t]
                for j in range(n):
                    term = term * pw[j, exps[t, j]]
                acc = acc + term
            out[i] = acc
    return out_arr


def weighted_monomial_sums(const double[:, ::1] points, const double[::1] weights,
                           const long long[:, ::1] exps):
    """Return ``S[m] = sum_i weights[i] * points[i]**exps[m]`` for every row of ``exps``."""
    cdef Py_ssize_t N = points.shape[0], n = points.shape[1], M = exps.shape[0]
    cdef Py_ssize_t i, j, m
    cdef Py_ssize_t maxdeg = 0
    for m in range(M):
        for j in range(n):
            if exps[m, j] > maxdeg:
                maxdeg = exps[m, j]
    out_arr = np.zeros(M, dtype=np.float64)
    pw_arr = np.empty((n, maxdeg + 1), dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double[:, ::1] pw = pw_arr
    cdef double mono
    with nogil:
        for i in range(N):
            _powers(points, i, pw, maxdeg)
            for m in range(M):
                mono = 1.0
                for j in range(n):
                    mono = mono * pw[j, exps[m, j]]
                out[m] = out[m] + weights[i] * mono
    return out_arr
