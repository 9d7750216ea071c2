"""Seeded random states, unitaries and bases for property checks."""
from __future__ import annotations

import numpy as np

from .hilbert import Decomposition, Ket, Operator, SpaceRegistry


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_ket(registry: SpaceRegistry, rng: np.random.Generator) -> Ket:
    v = complex_normal(rng, registry.total)
    return Ket(registry, v / np.linalg.norm(v))


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR with the phase correction."""
    q, r = np.linalg.qr(complex_normal(rng, (d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_isometry(d_out: int, d_in: int, rng: np.random.Generator) -> np.ndarray:
    return random_unitary(d_out, rng)[:, :d_in]


def random_density(registry: SpaceRegistry, rng: np.random.Generator, rank: int | None = None) -> Operator:
    d = registry.total
    g = complex_normal(rng, (d, rank or d))
    m = g @ g.conj().T
    return Operator(registry, m / np.trace(m).real)


def random_basis(registry: SpaceRegistry, rng: np.random.Generator) -> Decomposition:
    return Decomposition.from_basis(registry, random_unitary(registry.total, rng))


def fourier_basis(registry: SpaceRegistry) -> Decomposition:
    """Basis mutually unbiased to the computational one."""
    d = registry.total
    j, k = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return Decomposition.from_basis(registry, np.exp(2j * np.pi * j * k / d) / np.sqrt(d))


def rotated_fourier_basis(registry: SpaceRegistry, u: np.ndarray) -> tuple[Decomposition, Decomposition]:
    """A random pair of mutually unbiased bases: the columns of u and u times the Fourier matrix."""
    f = fourier_basis(registry).basis_vectors()
    return Decomposition.from_basis(registry, u), Decomposition.from_basis(registry, u @ f)


def maximally_entangled(reg_a: SpaceRegistry, reg_b: SpaceRegistry, rng: np.random.Generator,
                        embed: bool = True) -> Ket:
    """Random maximally entangled ket on a (x) b with d_b >= d_a."""
    da, db = reg_a.total, reg_b.total
    if db < da:
        raise ValueError("need d_b >= d_a for maximal entanglement")
    w = random_isometry(db, da, rng) if embed else np.eye(db, da)
    u = random_unitary(da, rng)
    mat = u @ w.T / np.sqrt(da)  # rows index a, columns index b
    return Ket(reg_a + reg_b, mat.ravel())
