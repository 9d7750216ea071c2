"""Numpy implementations of the kernels in ``_kernels.pyx``.

Same signatures and results; used when the compiled module is unavailable
or when ``CHANKET_PURE_PYTHON`` is set.
"""
import numpy as np


def reduce_operator(mat, keep_off, trace_off):
    idx = keep_off[:, None] + trace_off[None, :]
    return mat[idx[:, None, :], idx[None, :, :]].sum(axis=-1)


def reduce_cross(x, y, keep_off, trace_off):
    idx = keep_off[:, None] + trace_off[None, :]
    return x[idx] @ y[idx].conj().T


def partial_transpose(mat, stride, dim):
    n = mat.shape[0]
    outer = n // (stride * dim)
    t = np.asarray(mat).reshape(outer, dim, stride, outer, dim, stride)
    return np.ascontiguousarray(t.transpose(0, 4, 2, 3, 1, 5)).reshape(n, n)
