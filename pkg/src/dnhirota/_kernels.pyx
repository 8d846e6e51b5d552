# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled series kernels.  Same contract as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.complex128_t cplx
ctypedef cnp.int64_t idx_t


def mul_csr(const cplx[::1] a, const cplx[::1] b, const idx_t[::1] row_ptr,
            const idx_t[::1] cols, cplx[::1] out):
    cdef Py_ssize_t i, k, start, stop
    cdef Py_ssize_t m = a.shape[0]
    cdef double ar, ai, br, bi
    cdef idx_t c
    cdef double *o = <double *> &out[0]
    cdef const double *bp = <const double *> &b[0]
    with nogil:
        for i in range(m):
            ar = a[i].real
            ai = a[i].imag
            if ar == 0.0 and ai == 0.0:
                continue
            start = row_ptr[i]
            stop = row_ptr[i + 1]
            for k in range(stop - start):
                br = bp[2 * k]
                bi = bp[2 * k + 1]
                if br == 0.0 and bi == 0.0:
                    continue
                c = cols[start + k]
                o[2 * c] += ar * br - ai * bi
                o[2 * c + 1] += ar * bi + ai * br
    return np.asarray(out)


def scatter_scaled(const idx_t[::1] src, const idx_t[::1] dst, const cplx[::1] factor,
                   const cplx[::1] a, cplx[::1] out):
    cdef Py_ssize_t k
    cdef Py_ssize_t nk = src.shape[0]
    with nogil:
        for k in range(nk):
            out[dst[k]] = out[dst[k]] + factor[k] * a[src[k]]
    return np.asarray(out)
