# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see _kernels_py for the shared contracts."""

from libc.math cimport sqrt

import numpy as np

cdef double DISTINCT_RTOL = 1e-9


def conv_acc(const double complex[::1] a, const double complex[::1] b,
             const int[:, ::1] table, double complex[::1] out):
    cdef Py_ssize_t i, j
    cdef double complex av
    for i in range(a.shape[0]):
        av = a[i]
        if av == 0:
            continue
        for j in range(b.shape[0]):
            out[table[i, j]] += av * b[j]


cdef int _push(double* tvals, long long* tflats, int count, int k,
               double v, long long flat) noexcept nogil:
    """Insert (v, flat) into the descending top-k list if value-distinct."""
    cdef int i, j
    cdef double tol = DISTINCT_RTOL * (tvals[0] if count > 0 and tvals[0] > v else v)
    if tol <= 0:
        tol = 1e-300
    for i in range(count):
        if v - tvals[i] <= tol and tvals[i] - v <= tol:
            return count  # same value batch: keep the earlier (lex-first) point
    i = count
    for j in range(count):
        if v > tvals[j]:
            i = j
            break
    if i >= k:
        return count
    if count < k:
        count += 1
    for j in range(count - 1, i, -1):
        tvals[j] = tvals[j - 1]
        tflats[j] = tflats[j - 1]
    tvals[i] = v
    tflats[i] = flat
    return count


def poly_grid_topk(const double complex[:, ::1] coeffs, const int[:, ::1] expo,
                   const double complex[:, :, ::1] pp, int k):
    cdef int C = coeffs.shape[0]
    cdef int K = coeffs.shape[1]
    cdef int n = expo.shape[1]
    cdef int G = pp.shape[2]
    cdef long long total = 1
    cdef int v, c, kk, count = 0, dirty = 1
    for v in range(n):
        total *= G
    mono_arr = np.empty(K, dtype=np.complex128)
    # advancing the fastest coordinate multiplies each monomial by a fixed
    # phase step; full recomputation only happens on odometer wrap
    theta = 2.0 * np.pi / G
    step_arr = np.exp(1j * theta * np.asarray(expo)[:, n - 1].astype(np.float64))
    g_arr = np.zeros(n, dtype=np.int64)
    tv_arr = np.full(k, -1.0)
    tf_arr = np.zeros(k, dtype=np.int64)
    cdef double complex[::1] mono = mono_arr
    cdef double complex[::1] step = step_arr
    cdef long long[::1] g = g_arr
    cdef double[::1] tv = tv_arr
    cdef long long[::1] tf = tf_arr
    cdef long long flat
    cdef double complex m, acc
    cdef double val, av, vmin
    with nogil:
        for flat in range(total):
            if dirty:
                for kk in range(K):
                    m = 1.0
                    for v in range(n):
                        m = m * pp[v, expo[kk, v], g[v]]
                    mono[kk] = m
                dirty = 0
            val = 0.0
            for c in range(C):
                acc = 0.0
                for kk in range(K):
                    acc = acc + coeffs[c, kk] * mono[kk]
                av = acc.real * acc.real + acc.imag * acc.imag
                if av > val:
                    val = av
            val = sqrt(val)
            vmin = tv[count - 1] if count == k else -1.0
            if count < k or val > vmin:
                count = _push(&tv[0], &tf[0], count, k, val, flat)
            # odometer, last variable fastest (lexicographic flat order)
            g[n - 1] += 1
            if g[n - 1] < G:
                for kk in range(K):
                    mono[kk] = mono[kk] * step[kk]
            else:
                g[n - 1] = 0
                v = n - 2
                while v >= 0:
                    g[v] += 1
                    if g[v] < G:
                        break
                    g[v] = 0
                    v -= 1
                dirty = 1
    return tv_arr[:count].copy(), tf_arr[:count].copy()


def bilinear_grid_topk(const double complex[:, :, ::1] amat,
                       const double complex[:, ::1] phases, int k):
    cdef int C = amat.shape[0]
    cdef int n = amat.shape[1]
    cdef int G = phases.shape[1]
    cdef long long total = 1
    cdef int v, c, row, i, count = 0
    for v in range(n):
        total *= G
    x_arr = np.empty(n, dtype=np.complex128)
    g_arr = np.zeros(n, dtype=np.int64)
    tv_arr = np.full(k, -1.0)
    tf_arr = np.zeros(k, dtype=np.int64)
    cdef double complex[::1] x = x_arr
    cdef long long[::1] g = g_arr
    cdef double[::1] tv = tv_arr
    cdef long long[::1] tf = tf_arr
    cdef long long flat
    cdef double complex rv
    cdef double val, s, vmin
    with nogil:
        for flat in range(total):
            for v in range(n):
                x[v] = phases[v, g[v]]
            val = 0.0
            for c in range(C):
                s = 0.0
                for row in range(n):
                    rv = 0.0
                    for i in range(n):
                        rv = rv + amat[c, row, i] * x[i]
                    s = s + sqrt(rv.real * rv.real + rv.imag * rv.imag)
                if s > val:
                    val = s
            vmin = tv[count - 1] if count == k else -1.0
            if count < k or val > vmin:
                count = _push(&tv[0], &tf[0], count, k, val, flat)
            v = n - 1
            while v >= 0:
                g[v] += 1
                if g[v] < G:
                    break
                g[v] = 0
                v -= 1
    return tv_arr[:count].copy(), tf_arr[:count].copy()
