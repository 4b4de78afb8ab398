# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled GF(2) kernels."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()


def gf2_solve_packed(aug, int ncols):
    cdef uint64_t[:, ::1] a = np.ascontiguousarray(aug, dtype=np.uint64).copy()
    cdef Py_ssize_t m = a.shape[0], nw = a.shape[1]
    cdef Py_ssize_t r = 0, c, i, k, p, w
    cdef uint64_t mask, t
    cdef Py_ssize_t[:] piv = np.empty(ncols, dtype=np.intp)
    cdef Py_ssize_t npiv = 0
    for c in range(ncols):
        w = c >> 6
        mask = (<uint64_t>1) << (c & 63)
        p = -1
        for i in range(r, m):
            if a[i, w] & mask:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for k in range(nw):
                t = a[r, k]
                a[r, k] = a[p, k]
                a[p, k] = t
        for i in range(m):
            if i != r and (a[i, w] & mask):
                for k in range(w, nw):
                    a[i, k] ^= a[r, k]
        piv[npiv] = c
        npiv += 1
        r += 1
    cdef Py_ssize_t bw = ncols >> 6
    cdef uint64_t bmask = (<uint64_t>1) << (ncols & 63)
    for i in range(r, m):
        if a[i, bw] & bmask:
            return None
    x = np.zeros(ncols, dtype=np.uint8)
    cdef cnp.uint8_t[:] xv = x
    for i in range(npiv):
        xv[piv[i]] = 1 if (a[i, bw] & bmask) else 0
    return x


def column_residual(d, tin_ptr, tin_idx, Py_ssize_t n):
    cdef int64_t[:] dv = np.asarray(d, dtype=np.int64)
    cdef int64_t[:] ptr = np.asarray(tin_ptr, dtype=np.int64)
    cdef int64_t[:] idx = np.asarray(tin_idx, dtype=np.int64)
    r = np.zeros(n, dtype=np.uint8)
    cdef cnp.uint8_t[:] rv = r
    cdef Py_ssize_t j, k, y
    for j in range(dv.shape[0]):
        y = dv[j]
        rv[y] ^= 1
        for k in range(ptr[y], ptr[y + 1]):
            rv[idx[k]] ^= 1
    return r
