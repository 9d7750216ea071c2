"""Backend selection for the hot kernels.

The compiled Cython module is used when it imports; otherwise, or when the
environment variable ``CHANKET_PURE_PYTHON`` is set to a non-empty value,
the numpy implementation is used. ``BACKEND`` names the active choice.
"""
import os

from . import _kernels_py

if os.environ.get("CHANKET_PURE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"
    else:
        BACKEND = "cython"

reduce_operator = _impl.reduce_operator
reduce_cross = _impl.reduce_cross
partial_transpose = _impl.partial_transpose

__all__ = ["BACKEND", "reduce_operator", "reduce_cross", "partial_transpose"]
