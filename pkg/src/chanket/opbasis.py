"""Hermitian operator bases and coefficient expansions in them.

For a d-dimensional space the basis is sigma^0 = I followed by d^2 - 1
traceless Hermitian matrices with Tr(sigma^j sigma^k) = d delta_jk. For
d = 2 these are exactly I, X, Y, Z. For larger d they are generalized
Gell-Mann matrices rescaled to the same normalization, ordered as symmetric
off-diagonal pairs, then antisymmetric pairs, then diagonal ones.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .config import TOL
from .hilbert import Operator, SpaceRegistry

PAULI_NAMES = ("I", "X", "Y", "Z")


@dataclass(frozen=True, eq=False)
class OperatorBasis:
    dim: int
    elements: np.ndarray  # (d*d, d, d)

    @property
    def name(self) -> str:
        return "pauli" if self.dim == 2 else "gellmann"

    def __len__(self):
        return self.elements.shape[0]

    def __getitem__(self, j) -> np.ndarray:
        return self.elements[j]

    def gram(self) -> np.ndarray:
        return np.einsum("jxy,kyx->jk", self.elements, self.elements)

    def element_name(self, j: int) -> str:
        if self.dim == 2:
            return PAULI_NAMES[j]
        return f"g{j}"


@lru_cache(maxsize=None)
def _basis_elements(d: int) -> np.ndarray:
    mats = [np.eye(d, dtype=complex)]
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = m[k, j] = 1.0
        mats.append(m)
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = -1j
        m[k, j] = 1j
        mats.append(m)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        mats.append(np.diag(diag * np.sqrt(2.0 / (l * (l + 1)))).astype(complex))
    out = np.stack(mats)
    out[1:] *= np.sqrt(d / 2.0)
    out.setflags(write=False)
    return out


def hermitian_basis(d: int) -> OperatorBasis:
    if d < 2:
        raise ValueError(f"operator basis needs d >= 2, got {d}")
    return OperatorBasis(d, _basis_elements(int(d)))


def _subsystem_stack(d: int) -> np.ndarray:
    # a 1-dimensional factor contributes the trivial basis {1}
    return np.ones((1, 1, 1), dtype=complex) if d == 1 else _basis_elements(d)


@dataclass(frozen=True, eq=False)
class CoefficientTensor:
    """Op = normalization * sum c[j1..jn] sigma^j1 (x) ... (x) sigma^jn.

    ``normalization`` is 1 / (d1 * ... * dn), so for two qubits
    ``4 * Op = sum c sigma sigma``, and c[0, ..., 0] = Tr(Op).
    """

    registry: SpaceRegistry
    coefficients: np.ndarray
    normalization: float

    @property
    def basis_names(self) -> tuple[str, ...]:
        return tuple("pauli" if d == 2 else "gellmann" for d in self.registry.dims)

    def is_real(self, tol: float = TOL) -> bool:
        return bool(np.all(np.abs(np.imag(self.coefficients)) <= tol))

    def real(self) -> np.ndarray:
        return np.real(self.coefficients)

    def term(self, *indices: int) -> complex:
        return complex(self.coefficients[tuple(indices)])

    def nonzero_terms(self, tol: float = TOL) -> dict[str, float]:
        """Map like {"XX": 1.0, "ZZ": 0.8} of coefficients above ``tol`` (real parts)."""
        out = {}
        dims = self.registry.dims
        for idx in zip(*np.nonzero(np.abs(self.coefficients) > tol)):
            name = "".join(
                PAULI_NAMES[j] if d == 2 else f"g{j}." for j, d in zip(idx, dims)
            )
            out[name] = float(np.real(self.coefficients[idx]))
        return out

    def to_json(self) -> dict:
        c = self.coefficients
        data = (np.real(c) + 0.0).tolist() if self.is_real() else np.stack([c.real, c.imag], -1).tolist()
        return {
            "registry": self.registry.to_json(),
            "basis": list(self.basis_names),
            "normalization": self.normalization,
            "coefficients": data,
        }

    @classmethod
    def from_json(cls, data: dict) -> CoefficientTensor:
        reg = SpaceRegistry.from_json(data["registry"])
        arr = np.asarray(data["coefficients"], dtype=float)
        shape = tuple(max(d * d, 1) for d in reg.dims)
        if arr.shape != shape:
            arr = arr[..., 0] + 1j * arr[..., 1]
        return cls(reg, arr, float(data["normalization"]))


def pauli_expand(op: Operator, tol: float = TOL) -> CoefficientTensor:
    """Expand ``op`` in the tensor-product Hermitian basis of its registry."""
    dims = op.registry.dims
    n = len(dims)
    # axes: [r_k .. r_n, c_k .. c_n, j_0 .. j_{k-1}] while processing subsystem k
    t = op.matrix.reshape(dims * 2)
    for k, d in enumerate(dims):
        # Tr(S op) = sum S[x, y] op[y, x]
        t = np.tensordot(_subsystem_stack(d), t, axes=([2, 1], [0, n - k]))
        t = np.moveaxis(t, 0, -1)
    coeffs = t
    if float(np.abs(np.imag(coeffs)).max(initial=0.0)) <= tol and op.is_hermitian(tol):
        coeffs = np.real(coeffs).copy()
    return CoefficientTensor(op.registry, coeffs, 1.0 / op.registry.total)


def pauli_assemble(coeffs: CoefficientTensor) -> Operator:
    reg = coeffs.registry
    c = np.asarray(coeffs.coefficients, dtype=complex)
    expected = tuple(max(d * d, 1) for d in reg.dims)
    if c.shape != expected:
        raise ValueError(f"coefficient shape {c.shape} does not match {expected}")
    n = len(reg.dims)
    t = c
    for d in reg.dims:
        t = np.tensordot(t, _subsystem_stack(d), axes=([0], [0]))
    # axes now r1, c1, r2, c2, ...
    t = t.transpose(list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2)))
    return Operator(reg, t.reshape(reg.total, reg.total) * coeffs.normalization)


def trace_out_in_coefficients(coeffs: CoefficientTensor, label: str) -> CoefficientTensor:
    """Partial trace done in coefficient space: keep index 0 on ``label``, scale by its dim."""
    reg = coeffs.registry
    c = np.take(coeffs.coefficients, 0, axis=reg.index(label))
    kept = reg.without(label)
    # normalization 1/D_kept = d / D_full, so the d factor is absorbed
    return CoefficientTensor(kept, c, 1.0 / kept.total)


def pauli_string(labels: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Kronecker product of basis elements, one index per subsystem."""
    out = np.ones((1, 1), dtype=complex)
    for j, d in zip(labels, dims):
        out = np.kron(out, _subsystem_stack(d)[j])
    return out
