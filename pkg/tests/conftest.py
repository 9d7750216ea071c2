import numpy as np
import pytest

from chanket import _kernels_py, kernels

try:
    from chanket import _kernels as _kernels_c
except ImportError:
    _kernels_c = None

BACKENDS = ["python"] + (["cython"] if _kernels_c is not None else [])


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Route every kernel call through one backend for the duration of a test."""
    mod = _kernels_py if request.param == "python" else _kernels_c
    for name in ("reduce_operator", "reduce_cross", "partial_transpose"):
        monkeypatch.setattr(kernels, name, getattr(mod, name))
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
