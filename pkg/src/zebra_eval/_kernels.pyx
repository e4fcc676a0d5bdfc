# cython: language_level=3
"""Compiled kernels. Mirrors ``_purepy`` function for function."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, expm1, log1p, fabs

cnp.import_array()

cdef double Z_SERIES_CUTOFF = 1e-3
Z_SERIES_CUTOFF_PY = Z_SERIES_CUTOFF


def pav_merge(group_a, group_n):
    cdef const cnp.int64_t[:] a_in = np.ascontiguousarray(group_a, dtype=np.int64)
    cdef const cnp.int64_t[:] n_in = np.ascontiguousarray(group_n, dtype=np.int64)
    cdef Py_ssize_t m = a_in.shape[0]
    blk_a_arr = np.empty(m, dtype=np.int64)
    blk_n_arr = np.empty(m, dtype=np.int64)
    blk_len_arr = np.empty(m, dtype=np.int64)
    cdef cnp.int64_t[:] blk_a = blk_a_arr
    cdef cnp.int64_t[:] blk_n = blk_n_arr
    cdef cnp.int64_t[:] blk_len = blk_len_arr
    cdef Py_ssize_t top = -1
    cdef Py_ssize_t i
    cdef cnp.int64_t a, n, length
    for i in range(m):
        a = a_in[i]
        n = n_in[i]
        length = 1
        while top >= 0 and blk_a[top] * n >= a * blk_n[top]:
            a += blk_a[top]
            n += blk_n[top]
            length += blk_len[top]
            top -= 1
        top += 1
        blk_a[top] = a
        blk_n[top] = n
        blk_len[top] = length
    k = top + 1
    group_block = np.repeat(np.arange(k, dtype=np.int64), blk_len_arr[:k])
    return blk_a_arr[:k].copy(), blk_n_arr[:k].copy(), group_block


cdef inline double _softplus(double x) nogil:
    if x > 0.0:
        return x + log1p(exp(-x))
    return log1p(exp(x))


def softplus_means(values, weights, shifts):
    cdef const double[:] v = np.ascontiguousarray(values, dtype=np.float64)
    w_arr = np.asarray(weights, dtype=np.float64)
    cdef const double[:] w = np.ascontiguousarray(w_arr / w_arr.sum())
    cdef const double[:] s = np.ascontiguousarray(shifts, dtype=np.float64)
    cdef Py_ssize_t nv = v.shape[0]
    cdef Py_ssize_t ns = s.shape[0]
    out_arr = np.empty(ns, dtype=np.float64)
    cdef double[:] out = out_arr
    cdef Py_ssize_t i, j
    cdef double acc, comp, term, tmp, shift
    with nogil:
        for j in range(ns):
            shift = s[j]
            acc = 0.0
            comp = 0.0
            for i in range(nv):
                term = w[i] * _softplus(v[i] + shift)
                # Neumaier compensated summation
                tmp = acc + term
                if fabs(acc) >= fabs(term):
                    comp += (acc - tmp) + term
                else:
                    comp += (term - tmp) + acc
                acc = tmp
            out[j] = acc + comp
    return out_arr


cdef inline double _z(double t) nogil:
    cdef double e = 0.0, w, u
    if t < 0.01:
        # expm1(t) >= 1e-3 for every t >= 0.01, so larger t skip the series test
        e = expm1(t)
        if fabs(e) < Z_SERIES_CUTOFF:
            return e * (1.0 / 6.0 + e * (-1.0 / 8.0 + e * (1.0 / 10.0)))
    if t > 0.0:
        w = -expm1(-t)
        u = exp(-t)
        return (w * (3.0 * w - 2.0) + 2.0 * t * u * u) / (4.0 * w * w)
    return (e * (e - 2.0) + 2.0 * t) / (4.0 * e * e)


def z_values(log_x):
    cdef const double[:] t = np.ascontiguousarray(log_x, dtype=np.float64).reshape(-1)
    cdef Py_ssize_t n = t.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[:] out = out_arr
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            out[i] = _z(t[i])
    return out_arr.reshape(np.shape(log_x))


def z_mean(log_x, weights):
    cdef const double[:] t = np.ascontiguousarray(log_x, dtype=np.float64)
    w_arr = np.asarray(weights, dtype=np.float64)
    cdef const double[:] w = np.ascontiguousarray(w_arr / w_arr.sum())
    cdef Py_ssize_t n = t.shape[0]
    cdef Py_ssize_t i
    cdef double acc = 0.0, comp = 0.0, term, tmp
    with nogil:
        for i in range(n):
            term = w[i] * _z(t[i])
            tmp = acc + term
            if fabs(acc) >= fabs(term):
                comp += (acc - tmp) + term
            else:
                comp += (term - tmp) + acc
            acc = tmp
    return acc + comp
