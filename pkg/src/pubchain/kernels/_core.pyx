# distutils: language = c++
# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scoring kernels: per-row copy, sort, trimmed average.

Each row is copied into a reused scratch buffer and sorted: insertion sort
for short rows (reader lists are usually a few dozen entries, where sort
call overhead dominates), std::sort beyond that. The kept slice accumulates
strictly left to right so results match the numpy fallback bit for bit.
"""

from libc.stdlib cimport free, malloc
from libcpp.algorithm cimport sort

import numpy as np

BACKEND = "compiled"

DEF INSERTION_CUTOFF = 64


cdef inline void _sort_row(double* buf, Py_ssize_t m) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double x
    if m <= INSERTION_CUTOFF:
        for i in range(1, m):
            x = buf[i]
            j = i
            while j > 0 and buf[j - 1] > x:
                buf[j] = buf[j - 1]
                j -= 1
            buf[j] = x
    else:
        sort(buf, buf + m)


def trimmed_means(values, offsets, long trim_num, long trim_den, long min_count):
    values_arr = np.ascontiguousarray(values, dtype=np.float64)
    offsets_arr = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef double[::1] vals = values_arr
    cdef long long[::1] offs = offsets_arr
    cdef Py_ssize_t n_rows = offs.shape[0] - 1
    out_arr = np.zeros(n_rows, dtype=np.float64)
    if n_rows <= 0:
        return out_arr
    cdef double[::1] out = out_arr

    cdef Py_ssize_t i, j, start, m, k, max_len = 0
    for i in range(n_rows):
        m = offs[i + 1] - offs[i]
        if m < 0 or offs[i + 1] > vals.shape[0]:
            raise ValueError("offsets do not describe rows inside values")
        if m > max_len:
            max_len = m
    if max_len == 0:
        return out_arr

    cdef double* scratch = <double*> malloc(max_len * sizeof(double))
    if scratch == NULL:
        raise MemoryError()
    cdef double acc
    try:
        with nogil:
            for i in range(n_rows):
                start = offs[i]
                m = offs[i + 1] - start
                if m == 0 or m < min_count:
                    out[i] = 0.0
                    continue
                for j in range(m):
                    scratch[j] = vals[start + j]
                _sort_row(scratch, m)
                k = (m * trim_num) // trim_den
                acc = 0.0
                for j in range(k, m - k):
                    acc += scratch[j]
                out[i] = acc / (m - 2 * k)
    finally:
        free(scratch)
    return out_arr
