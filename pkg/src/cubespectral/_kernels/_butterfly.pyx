# cython: boundscheck=False, wraparound=False, cdivision=True
"""In-place butterfly transform over axis 0 of a (2**n, k) complex array."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def fwht_inplace(cnp.complex128_t[:, ::1] a):
    """Hadamard butterfly, unnormalized: a[x] <- sum_v a[v] * (-1)^popcount(v & x)."""
    cdef Py_ssize_t rows = a.shape[0]
    cdef Py_ssize_t cols = a.shape[1]
    cdef Py_ssize_t h = 1
    cdef Py_ssize_t i, j, c
    cdef double complex u, v
    while h < rows:
        for i in range(0, rows, 2 * h):
            for j in range(i, i + h):
                for c in range(cols):
                    u = a[j, c]
                    v = a[j + h, c]
                    a[j, c] = u + v
                    a[j + h, c] = u - v
        h *= 2
