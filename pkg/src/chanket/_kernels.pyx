"""Compiled inner loops for partial traces and partial transposes.

All routines work on flat row-major index offsets precomputed by
:mod:`chanket.hilbert`: an entry of the full matrix with kept multi-index
``i`` and traced multi-index ``t`` lives at ``keep_off[i] + trace_off[t]``.
"""
import numpy as np


def reduce_operator(const double complex[:, ::1] mat,
                    const Py_ssize_t[::1] keep_off,
                    const Py_ssize_t[::1] trace_off):
    cdef Py_ssize_t nk = keep_off.shape[0]
    cdef Py_ssize_t nt = trace_off.shape[0]
    out = np.empty((nk, nk), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    cdef Py_ssize_t i, j, t, r, c, s
    cdef double complex acc
    for i in range(nk):
        r = keep_off[i]
        for j in range(nk):
            c = keep_off[j]
            acc = 0
            for t in range(nt):
                s = trace_off[t]
                acc = acc + mat[r + s, c + s]
            o[i, j] = acc
    return out


def reduce_cross(const double complex[::1] x,
                 const double complex[::1] y,
                 const Py_ssize_t[::1] keep_off,
                 const Py_ssize_t[::1] trace_off):
    """Reduced operator of the dyad |x><y| without forming the dyad."""
    cdef Py_ssize_t nk = keep_off.shape[0]
    cdef Py_ssize_t nt = trace_off.shape[0]
    out = np.empty((nk, nk), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    cdef Py_ssize_t i, j, t, r, c, s
    cdef double complex acc, yv
    for i in range(nk):
        r = keep_off[i]
        for j in range(nk):
            c = keep_off[j]
            acc = 0
            for t in range(nt):
                s = trace_off[t]
                yv = y[c + s]
                acc = acc + x[r + s] * (yv.real - 1j * yv.imag)
            o[i, j] = acc
    return out


def partial_transpose(const double complex[:, ::1] mat,
                      Py_ssize_t stride, Py_ssize_t dim):
    """Swap the row and column digit of one subsystem; the inner copy is contiguous."""
    cdef Py_ssize_t n = mat.shape[0]
    cdef Py_ssize_t block = stride * dim
    cdef Py_ssize_t outer = n // block
    out = np.empty((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    cdef Py_ssize_t o1, i, s1, o2, j, s2, r, c, rs, cs
    for o1 in range(outer):
        for i in range(dim):
            for s1 in range(stride):
                r = o1 * block + i * stride + s1
                for o2 in range(outer):
                    for j in range(dim):
                        # element (o1 i s1, o2 j s2) comes from (o1 j s1, o2 i s2)
                        rs = o1 * block + j * stride + s1
                        c = o2 * block + j * stride
                        cs = o2 * block + i * stride
                        for s2 in range(stride):
                            o[r, c + s2] = mat[rs, cs + s2]
    return out
