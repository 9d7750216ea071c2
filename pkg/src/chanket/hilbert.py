"""Labeled tensor-product spaces and the dense linear algebra built on them.

Every ket and operator carries a :class:`SpaceRegistry`, an ordered list of
``(label, dim)`` pairs that fixes the tensor-index order. Indices are
row-major in registration order, so the first label is the most significant
digit of a flat index.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence, Union

import numpy as np

from . import kernels
from .config import CLAMP_TOL, LOG_BASE, RANK_TOL, TOL

Labels = Union[str, Iterable[str]]


def _as_labels(labels: Labels) -> tuple[str, ...]:
    if isinstance(labels, str):
        return (labels,)
    return tuple(labels)


def _frozen(array, dtype=np.complex128) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True, order="C")
    out.setflags(write=False)
    return out


@lru_cache(maxsize=4096)
def _offsets(dims: tuple[int, ...], positions: tuple[int, ...]) -> np.ndarray:
    strides = np.ones(len(dims), dtype=np.intp)
    for k in range(len(dims) - 2, -1, -1):
        strides[k] = strides[k + 1] * dims[k + 1]
    off = np.zeros(1, dtype=np.intp)
    for p in positions:
        off = (off[:, None] + np.arange(dims[p], dtype=np.intp)[None, :] * strides[p]).ravel()
    off.setflags(write=False)
    return off


@dataclass(frozen=True)
class SpaceRegistry:
    """Ordered, immutable set of labeled subsystems."""

    subsystems: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        subs = tuple((str(lab), int(dim)) for lab, dim in self.subsystems)
        labels = [lab for lab, _ in subs]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate subsystem labels in {labels}")
        for lab, dim in subs:
            if dim < 1:
                raise ValueError(f"subsystem {lab!r} has dimension {dim} < 1")
        object.__setattr__(self, "subsystems", subs)

    @classmethod
    def from_dims(cls, labels: Sequence[str], dims: Sequence[int]) -> SpaceRegistry:
        labels = _as_labels(labels)
        if len(labels) != len(dims):
            raise ValueError("labels and dims differ in length")
        return cls(tuple(zip(labels, dims)))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.subsystems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.subsystems)

    @property
    def total(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64)) if self.subsystems else 1

    def __len__(self):
        return len(self.subsystems)

    def __contains__(self, label):
        return label in self.labels

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown subsystem label {label!r}; have {list(self.labels)}") from None

    def dim(self, labels: Labels) -> int:
        return int(np.prod([self.dims[self.index(lab)] for lab in _as_labels(labels)], dtype=np.int64))

    def sub(self, labels: Labels) -> SpaceRegistry:
        """Sub-registry of ``labels``, kept in registration order."""
        wanted = set(_as_labels(labels))
        for lab in wanted:
            self.index(lab)
        return SpaceRegistry(tuple(s for s in self.subsystems if s[0] in wanted))

    def without(self, labels: Labels) -> SpaceRegistry:
        dropped = set(_as_labels(labels))
        for lab in dropped:
            self.index(lab)
        return SpaceRegistry(tuple(s for s in self.subsystems if s[0] not in dropped))

    def reordered(self, order: Sequence[str]) -> SpaceRegistry:
        order = _as_labels(order)
        if sorted(order) != sorted(self.labels):
            raise ValueError(f"{order} is not a permutation of {self.labels}")
        return SpaceRegistry(tuple(self.subsystems[self.index(lab)] for lab in order))

    def __add__(self, other: SpaceRegistry) -> SpaceRegistry:
        clash = set(self.labels) & set(other.labels)
        if clash:
            raise ValueError(f"label collision: {sorted(clash)}")
        return SpaceRegistry(self.subsystems + other.subsystems)

    def offsets(self, labels: Labels) -> np.ndarray:
        """Flat-index offsets of every multi-index over ``labels`` (registry order)."""
        pos = tuple(sorted(self.index(lab) for lab in _as_labels(labels)))
        return _offsets(self.dims, pos)

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "dims": list(self.dims)}

    @classmethod
    def from_json(cls, data: dict) -> SpaceRegistry:
        return cls.from_dims(data["labels"], data["dims"])


@dataclass(frozen=True, eq=False)
class Ket:
    registry: SpaceRegistry
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes).ravel()
        if amps.shape[0] != self.registry.total:
            raise ValueError(
                f"ket has {amps.shape[0]} amplitudes, registry needs {self.registry.total}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, registry: SpaceRegistry, digits: Sequence[int] | int) -> Ket:
        """Computational basis ket; ``digits`` is a flat index or one digit per subsystem."""
        if isinstance(digits, (int, np.integer)):
            index = int(digits)
        else:
            index = int(np.ravel_multi_index(tuple(digits), registry.dims))
        amps = np.zeros(registry.total, dtype=complex)
        amps[index] = 1.0
        return cls(registry, amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = TOL) -> bool:
        return abs(self.norm**2 - 1.0) <= tol

    def normalized(self) -> Ket:
        n = self.norm
        if n == 0:
            raise ValueError("cannot normalize the zero ket")
        return Ket(self.registry, self.amplitudes / n)

    def permute(self, order: Sequence[str]) -> Ket:
        reg = self.registry.reordered(order)
        perm = [self.registry.index(lab) for lab in reg.labels]
        amps = self.amplitudes.reshape(self.registry.dims).transpose(perm).ravel()
        return Ket(reg, amps)

    def as_matrix(self, left: Labels) -> np.ndarray:
        """Amplitudes as a (d_left, d_rest) matrix; both groups in registry order."""
        left = self.registry.sub(left).labels
        rest = self.registry.without(left).labels
        k = self.permute(left + rest)
        return k.amplitudes.reshape(self.registry.dim(left), -1)

    def inner(self, other: Ket) -> complex:
        _check_same(self.registry, other.registry)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_json(self) -> dict:
        return {"kind": "ket", "registry": self.registry.to_json(), "data": encode_complex(self.amplitudes)}


@dataclass(frozen=True, eq=False)
class Operator:
    registry: SpaceRegistry
    matrix: np.ndarray

    def __post_init__(self):
        mat = _frozen(self.matrix)
        n = self.registry.total
        if mat.shape != (n, n):
            raise ValueError(f"operator shape {mat.shape} does not match registry dimension {n}")
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def identity(cls, registry: SpaceRegistry) -> Operator:
        return cls(registry, np.eye(registry.total))

    # write-once flags at the default tolerance
    @cached_property
    def hermitian(self) -> bool:
        return self.is_hermitian()

    @cached_property
    def positive(self) -> bool:
        return self.is_positive()

    @cached_property
    def projector(self) -> bool:
        return self.is_projector()

    def is_hermitian(self, tol: float = TOL) -> bool:
        return float(np.linalg.norm(self.matrix - self.matrix.conj().T)) <= tol

    def is_positive(self, tol: float = TOL) -> bool:
        if not self.is_hermitian(tol):
            return False
        return float(np.linalg.eigvalsh(_herm(self.matrix)).min(initial=0.0)) >= -tol

    def is_projector(self, tol: float = TOL) -> bool:
        m = self.matrix
        return self.is_hermitian(tol) and float(np.linalg.norm(m @ m - m)) <= tol

    def is_density(self, tol: float = TOL) -> bool:
        return self.is_positive(tol) and abs(self.trace() - 1.0) <= tol

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def dagger(self) -> Operator:
        return Operator(self.registry, self.matrix.conj().T)

    def permute(self, order: Sequence[str]) -> Operator:
        reg = self.registry.reordered(order)
        perm = [self.registry.index(lab) for lab in reg.labels]
        n = len(perm)
        t = self.matrix.reshape(self.registry.dims * 2).transpose(perm + [p + n for p in perm])
        return Operator(reg, t.reshape(reg.total, reg.total))

    def distance(self, other: Operator) -> float:
        _check_same(self.registry, other.registry)
        return float(np.linalg.norm(self.matrix - other.matrix))

    def __add__(self, other: Operator) -> Operator:
        _check_same(self.registry, other.registry)
        return Operator(self.registry, self.matrix + other.matrix)

    def __sub__(self, other: Operator) -> Operator:
        _check_same(self.registry, other.registry)
        return Operator(self.registry, self.matrix - other.matrix)

    def __matmul__(self, other: Operator) -> Operator:
        _check_same(self.registry, other.registry)
        return Operator(self.registry, self.matrix @ other.matrix)

    def __mul__(self, scalar) -> Operator:
        return Operator(self.registry, self.matrix * scalar)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {"kind": "operator", "registry": self.registry.to_json(), "data": encode_complex(self.matrix)}


def _check_same(r1: SpaceRegistry, r2: SpaceRegistry):
    if r1 != r2:
        raise ValueError(f"registry mismatch: {r1.labels}{r1.dims} vs {r2.labels}{r2.dims}")


def _herm(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def phase_fix(vec: np.ndarray, tol: float = TOL) -> np.ndarray:
    """Multiply by a global phase so the first entry above ``tol`` is real positive."""
    flat = np.asarray(vec).ravel()
    nz = np.flatnonzero(np.abs(flat) > tol)
    if nz.size == 0:
        return np.asarray(vec)
    z = flat[nz[0]]
    return np.asarray(vec) * (abs(z) / z)


def inner_product(x: Operator, y: Operator) -> complex:
    """Operator-space inner product Tr(x^dagger y)."""
    _check_same(x.registry, y.registry)
    return complex(np.vdot(x.matrix, y.matrix))


def tensor(x, y):
    """Tensor product of two kets or two operators with disjoint labels."""
    reg = x.registry + y.registry
    if isinstance(x, Ket) and isinstance(y, Ket):
        return Ket(reg, np.kron(x.amplitudes, y.amplitudes))
    if isinstance(x, Operator) and isinstance(y, Operator):
        return Operator(reg, np.kron(x.matrix, y.matrix))
    raise TypeError("tensor needs two kets or two operators")


def embed(matrix: np.ndarray, sub: SpaceRegistry, full: SpaceRegistry) -> np.ndarray:
    """Matrix of ``matrix`` (acting on ``sub``) tensored with identity on the rest of ``full``."""
    rest = full.without(sub.labels)
    big = Operator(sub + rest, np.kron(np.asarray(matrix), np.eye(rest.total)))
    return big.permute(full.labels).matrix


def partial_trace(x: Ket | Operator, keep: Labels) -> Operator:
    """Trace out every subsystem not in ``keep``.

    A ket is treated as its dyad, without forming the full dyad. The result
    lives on the kept labels in registry order; keeping nothing gives a 1x1
    operator holding the full trace.
    """
    reg = x.registry
    kept = reg.sub(keep)
    keep_off = reg.offsets(kept.labels)
    trace_off = reg.offsets(reg.without(kept.labels).labels)
    if isinstance(x, Ket):
        amps = x.amplitudes
        mat = kernels.reduce_cross(amps, amps, keep_off, trace_off)
    else:
        mat = kernels.reduce_operator(x.matrix, keep_off, trace_off)
    return Operator(kept, mat)


def reduce_dyad(x: Ket, y: Ket, keep: Labels) -> np.ndarray:
    """Partial trace of |x><y| onto ``keep``, as a bare matrix."""
    _check_same(x.registry, y.registry)
    reg = x.registry
    kept = reg.sub(keep)
    return kernels.reduce_cross(
        x.amplitudes, y.amplitudes, reg.offsets(kept.labels), reg.offsets(reg.without(kept.labels).labels)
    )


def partial_transpose(op: Operator, label: str) -> Operator:
    """Transpose on one subsystem, in the stored computational basis."""
    reg = op.registry
    pos = reg.index(label)
    stride = int(np.prod(reg.dims[pos + 1:], dtype=np.int64))
    return Operator(reg, kernels.partial_transpose(op.matrix, stride, reg.dims[pos]))


def dyad(ket: Ket) -> Operator:
    return Operator(ket.registry, np.outer(ket.amplitudes, ket.amplitudes.conj()))


def _check_density(op: Operator, tol: float):
    if not op.is_positive(tol):
        raise ValueError("expected a positive operator")
    if abs(op.trace() - 1.0) > tol:
        raise ValueError(f"expected unit trace, got {op.trace().real:.3g}")


# ---------------------------------------------------------------------------
# decompositions of the identity
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Projectors on ``registry`` summing to the identity, mutually orthogonal.

    ``vectors`` holds basis kets as columns when the decomposition was built
    from an orthonormal basis, since the projectors alone lose their phases.
    Zero projectors are allowed.
    """

    registry: SpaceRegistry
    projectors: tuple
    vectors: np.ndarray | None = field(default=None)

    def __post_init__(self):
        projs = tuple(_frozen(p) for p in self.projectors)
        n = self.registry.total
        for p in projs:
            if p.shape != (n, n):
                raise ValueError(f"projector shape {p.shape} does not fit dimension {n}")
        object.__setattr__(self, "projectors", projs)
        if self.vectors is not None:
            object.__setattr__(self, "vectors", _frozen(self.vectors))

    @classmethod
    def from_projectors(cls, registry: SpaceRegistry, projectors, tol: float = TOL) -> Decomposition:
        projs = [np.asarray(p, dtype=complex) for p in projectors]
        total = sum(projs, np.zeros((registry.total,) * 2, dtype=complex))
        if np.linalg.norm(total - np.eye(registry.total)) > tol:
            raise ValueError("projectors do not sum to the identity")
        for k, p in enumerate(projs):
            for l in range(k, len(projs)):
                target = p if k == l else 0.0
                if np.linalg.norm(p @ projs[l] - target) > tol:
                    raise ValueError(f"projectors {k} and {l} violate P^k P^l = delta_kl P^k")
        return cls(registry, tuple(projs))

    @classmethod
    def from_basis(cls, registry: SpaceRegistry, vectors, tol: float = TOL) -> Decomposition:
        """Rank-1 decomposition from an orthonormal basis given as matrix columns."""
        v = np.asarray(vectors, dtype=complex)
        n = registry.total
        if v.shape != (n, n):
            raise ValueError(f"basis matrix must be {n}x{n}, got {v.shape}")
        if np.linalg.norm(v.conj().T @ v - np.eye(n)) > tol:
            raise ValueError("basis vectors are not orthonormal")
        return cls(registry, tuple(np.outer(v[:, j], v[:, j].conj()) for j in range(n)), v)

    @classmethod
    def computational(cls, registry: SpaceRegistry) -> Decomposition:
        return cls.from_basis(registry, np.eye(registry.total))

    @property
    def labels(self) -> tuple[str, ...]:
        return self.registry.labels

    def __len__(self):
        return len(self.projectors)

    def stack(self) -> np.ndarray:
        return np.stack(self.projectors)

    def is_rank1(self, tol: float = TOL) -> bool:
        return all(abs(np.trace(p).real - 1.0) <= tol for p in self.projectors)

    def basis_vectors(self, tol: float = TOL) -> np.ndarray:
        """Basis kets as columns; recovered from the projectors if not stored."""
        if self.vectors is not None:
            return self.vectors
        if not self.is_rank1(tol):
            raise ValueError("not a rank-1 decomposition")
        cols = []
        for p in self.projectors:
            w, v = np.linalg.eigh(_herm(p))
            cols.append(phase_fix(v[:, -1]))
        return np.stack(cols, axis=1)

    def transposed(self) -> Decomposition:
        """Decomposition with every projector transposed (vectors conjugated)."""
        vecs = None if self.vectors is None else self.vectors.conj()
        return Decomposition(self.registry, tuple(p.T for p in self.projectors), vecs)

    def relabeled(self, registry: SpaceRegistry) -> Decomposition:
        if registry.total != self.registry.total:
            raise ValueError("relabeling must keep the dimension")
        return Decomposition(registry, self.projectors, self.vectors)

    def to_json(self) -> dict:
        return {
            "registry": self.registry.to_json(),
            "projectors": [encode_complex(p) for p in self.projectors],
        }


def is_mutually_unbiased(first: Decomposition, second: Decomposition, tol: float = TOL) -> bool:
    """True iff every overlap between the two rank-1 bases has modulus 1/sqrt(d)."""
    if first.registry != second.registry:
        raise ValueError("decompositions live on different subsystems")
    if not (first.is_rank1(tol) and second.is_rank1(tol)):
        raise ValueError("mutual unbiasedness needs rank-1 decompositions")
    d = first.registry.total
    overlaps = np.sqrt(np.abs(np.einsum("jxy,kyx->jk", first.stack(), second.stack()).real))
    return bool(np.all(np.abs(overlaps - 1.0 / np.sqrt(d)) <= tol))


# ---------------------------------------------------------------------------
# Schmidt form, support, purification, entropy
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SchmidtForm:
    """|psi> = sum_j c_j |l_j> (x) |r_j>, coefficients sorted descending."""

    registry: SpaceRegistry
    left_labels: tuple[str, ...]
    coefficients: np.ndarray
    left_basis: tuple[Ket, ...]
    right_basis: tuple[Ket, ...]
    schmidt_rank: int

    @property
    def probabilities(self) -> np.ndarray:
        return self.coefficients**2

    def reassemble(self) -> Ket:
        left = np.stack([k.amplitudes for k in self.left_basis], axis=1)
        right = np.stack([k.amplitudes for k in self.right_basis], axis=1)
        mat = (left * self.coefficients) @ right.T
        split = self.left_basis[0].registry + self.right_basis[0].registry
        return Ket(split, mat.ravel()).permute(self.registry.labels)


def schmidt_decompose(ket: Ket, left: Labels, rank_tol: float = RANK_TOL) -> SchmidtForm:
    reg = ket.registry
    left_reg = reg.sub(left)
    if len(left_reg) == 0 or len(left_reg) == len(reg):
        raise ValueError("Schmidt decomposition needs a nonempty proper subset of labels")
    right_reg = reg.without(left_reg.labels)
    u, s, vh = np.linalg.svd(ket.as_matrix(left_reg.labels), full_matrices=False)
    cutoff = rank_tol * (s[0] if s.size else 0.0)
    rank = int(np.count_nonzero(s > cutoff)) if s.size and s[0] > 0 else 0
    return SchmidtForm(
        registry=reg,
        left_labels=left_reg.labels,
        coefficients=s,
        left_basis=tuple(Ket(left_reg, u[:, k]) for k in range(s.size)),
        right_basis=tuple(Ket(right_reg, vh[k, :]) for k in range(s.size)),
        schmidt_rank=rank,
    )


def support_and_rank(op: Operator, tol: float = TOL, rank_tol: float = RANK_TOL) -> tuple[Operator, int]:
    """Smallest projector P with P op P = op, and its rank."""
    if not op.is_positive(tol):
        raise ValueError("support_and_rank needs a positive operator")
    w, v = np.linalg.eigh(_herm(op.matrix))
    cutoff = rank_tol * max(float(w.max(initial=0.0)), 0.0)
    keep = w > cutoff if w.max(initial=0.0) > 0 else np.zeros_like(w, dtype=bool)
    vk = v[:, keep]
    return Operator(op.registry, vk @ vk.conj().T), int(keep.sum())


def rank(op: Operator, rank_tol: float = RANK_TOL) -> int:
    s = np.linalg.svd(op.matrix, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > rank_tol * s[0]))


def purify(density: Operator, env_label: str = "e", env_dim: int | None = None,
           tol: float = TOL, rank_tol: float = RANK_TOL) -> Ket:
    """Pure state on (density registry) + env whose reduction is ``density``.

    Uses the eigenbasis with eigenvalues sorted descending; the k-th
    eigenvector (phase fixed) is paired with environment basis ket k.
    ``env_dim`` defaults to the rank.
    """
    _check_density(density, tol)
    w, v = np.linalg.eigh(_herm(density.matrix))
    order = np.argsort(-w, kind="stable")
    w = np.clip(w[order], 0.0, None)
    v = v[:, order]
    r = int(np.count_nonzero(w > rank_tol * w[0]))
    if env_dim is None:
        env_dim = r
    if env_dim < r:
        raise ValueError(f"environment dimension {env_dim} is below the rank {r}")
    env = SpaceRegistry(((env_label, env_dim),))
    reg = density.registry + env
    mat = np.zeros((density.registry.total, env_dim), dtype=complex)
    for k in range(min(env_dim, w.size)):
        mat[:, k] = np.sqrt(w[k]) * phase_fix(v[:, k])
    return Ket(reg, mat.ravel())


def von_neumann_entropy(op: Operator, base: float = LOG_BASE, tol: float = TOL,
                        clamp_tol: float = CLAMP_TOL) -> float:
    _check_density(op, tol)
    w = np.linalg.eigvalsh(_herm(op.matrix))
    w = w[w > clamp_tol]
    return float(max(-np.sum(w * np.log(w)) / np.log(base), 0.0))


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def encode_complex(array) -> list:
    """Nested lists of [re, im] pairs, row-major."""
    a = np.asarray(array, dtype=complex)
    if a.ndim == 0:
        return [float(a.real) + 0.0, float(a.imag) + 0.0]
    return [encode_complex(x) for x in a]


def decode_complex(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("complex data must end in [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def from_json(data: dict) -> Ket | Operator:
    kind = data.get("kind")
    reg = SpaceRegistry.from_json(data["registry"])
    payload = decode_complex(data["data"])
    if kind == "ket":
        return Ket(reg, payload)
    if kind == "operator":
        return Operator(reg, payload)
    raise ValueError(f"unknown kind {kind!r}")
