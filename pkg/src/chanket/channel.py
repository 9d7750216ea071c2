"""Channel representations and the conversions among them.

A channel from entrance ``a`` to exit ``b`` is held as an isometry
V: a -> b (x) f, its channel ket on a (x) b (x) f, the dynamical operator
R = Tr_f |Psi><Psi|, the transition operator Q (R partially transposed on
the entrance), and a canonical Kraus set. The map-ket duality always uses
the computational basis of the entrance; a different basis changes the
channel ket by a unitary on ``a`` but leaves Q and the Kraus operators
unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import RANK_TOL, TOL
from .hilbert import (
    Decomposition,
    Ket,
    Labels,
    Operator,
    SpaceRegistry,
    _as_labels,
    decode_complex,
    dyad,
    encode_complex,
    partial_trace,
    partial_transpose,
    phase_fix,
    rank,
    schmidt_decompose,
)

STANDARD_KINDS = ("bit_flip", "amplitude_damping", "depolarizing")


@dataclass(frozen=True, eq=False)
class LinearMap:
    domain: SpaceRegistry
    codomain: SpaceRegistry
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex, copy=True)
        if m.shape != (self.codomain.total, self.domain.total):
            raise ValueError(
                f"map matrix has shape {m.shape}, expected {(self.codomain.total, self.domain.total)}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def isometry_residual(self) -> float:
        return float(np.linalg.norm(self.matrix.conj().T @ self.matrix - np.eye(self.domain.total)))

    def is_isometry(self, tol: float = TOL) -> bool:
        return self.isometry_residual() <= tol

    def is_unitary(self, tol: float = TOL) -> bool:
        return self.domain.total == self.codomain.total and self.is_isometry(tol)

    def to_json(self) -> dict:
        return {
            "domain": self.domain.to_json(),
            "codomain": self.codomain.to_json(),
            "data": encode_complex(self.matrix),
        }


def _basis_columns(basis: Decomposition | None, registry: SpaceRegistry) -> np.ndarray:
    if basis is None:
        return np.eye(registry.total, dtype=complex)
    if basis.registry.total != registry.total:
        raise ValueError("basis does not match the map domain")
    return basis.basis_vectors()


def ket_from_map(m: LinearMap, basis: Decomposition | None = None) -> Ket:
    """|psi> = sum_j |a^j> (x) M|a^j>, unnormalized."""
    a = _basis_columns(basis, m.domain)
    mat = a @ (m.matrix @ a).T  # rows: domain index, columns: codomain index
    return Ket(m.domain + m.codomain, mat.ravel())


def map_from_ket(psi: Ket, domain: Labels, basis: Decomposition | None = None) -> LinearMap:
    """Inverse duality: M|a^j> = <a^j|psi>, extended linearly."""
    dom = psi.registry.sub(domain)
    cod = psi.registry.without(dom.labels)
    a = _basis_columns(basis, dom)
    beta = psi.as_matrix(dom.labels).T @ a.conj()  # column j is |beta^j>
    return LinearMap(dom, cod, beta @ a.conj().T)


def channel_ket(v: LinearMap, tol: float = TOL) -> Ket:
    """Normalized channel ket sqrt(d_a)^-1 sum_j |a^j> (x) V|a^j>."""
    if not v.is_isometry(tol):
        raise ValueError(f"not an isometry (residual {v.isometry_residual():.2e})")
    psi = ket_from_map(v)
    return Ket(psi.registry, psi.amplitudes / np.sqrt(v.domain.total))


def dynamical_operator(psi: Ket, env: Labels = "f") -> Operator:
    env = _as_labels(env)
    return partial_trace(psi, psi.registry.without(env).labels)


def _transpose_labels(op: Operator, labels) -> Operator:
    for lab in _as_labels(labels):
        op = partial_transpose(op, lab)
    return op


def transition_operator(r: Operator, entrance: Labels = "a", tol: float = TOL) -> Operator:
    entrance = _as_labels(entrance)
    if not r.is_positive(tol):
        raise ValueError("dynamical operator must be positive")
    r_a = partial_trace(r, entrance).matrix
    d_a = r_a.shape[0]
    if np.linalg.norm(r_a - np.eye(d_a) / d_a) > tol:
        raise ValueError("dynamical operator's entrance marginal is not I/d_a")
    return _transpose_labels(r, entrance)


def _kraus_sort_key(coef: float, k: np.ndarray, tol: float):
    scale = max(tol, 1e-12)
    return (-round(coef / scale), tuple(np.round(k.real.ravel() / scale).astype(np.int64)))


def kraus_decompose(psi: Ket, entrance: Labels = "a", env: Labels = "f",
                    tol: float = TOL, rank_tol: float = RANK_TOL) -> tuple[list[LinearMap], int]:
    """Canonical Kraus operators from a Schmidt expansion over the environment.

    Ordered by descending Schmidt coefficient; each operator is multiplied by
    a phase making its first nonzero (row-major) entry real positive.
    """
    entrance = _as_labels(entrance)
    env = _as_labels(env)
    system = psi.registry.without(env).labels
    d_a = psi.registry.dim(entrance)
    form = schmidt_decompose(psi, system, rank_tol=rank_tol)
    ops = []
    for k in range(form.schmidt_rank):
        kappa = form.left_basis[k]
        scaled = Ket(kappa.registry, kappa.amplitudes * form.coefficients[k] * np.sqrt(d_a))
        m = map_from_ket(scaled, entrance)
        ops.append((form.coefficients[k], LinearMap(m.domain, m.codomain, phase_fix(m.matrix, tol))))
    ops.sort(key=lambda item: _kraus_sort_key(item[0], item[1].matrix, tol))
    return [m for _, m in ops], form.schmidt_rank


def stinespring(kraus: Sequence[np.ndarray], entrance: str = "a", exit: str = "b",
                env: str = "f") -> LinearMap:
    """Isometry V|a> = sum_l K_l|a> (x) |f^l> from a list of Kraus matrices."""
    ks = [np.asarray(k, dtype=complex) for k in kraus]
    if not ks:
        raise ValueError("need at least one Kraus operator")
    d_b, d_a = ks[0].shape
    if any(k.shape != (d_b, d_a) for k in ks):
        raise ValueError("Kraus operators differ in shape")
    v = np.stack(ks, axis=1).reshape(d_b * len(ks), d_a)
    dom = SpaceRegistry(((entrance, d_a),))
    cod = SpaceRegistry(((exit, d_b), (env, len(ks))))
    return LinearMap(dom, cod, v)


@dataclass(frozen=True, eq=False)
class ChannelBundle:
    """All representations of one channel, built once and kept consistent."""

    isometry: LinearMap
    channel_ket: Ket
    dynamical: Operator
    transition: Operator
    kraus: tuple[LinearMap, ...]
    kraus_rank: int
    entrance: tuple[str, ...]
    exit: tuple[str, ...]
    env: tuple[str, ...]

    @classmethod
    def from_isometry(cls, v: LinearMap, env: Labels = "f", tol: float = TOL,
                      rank_tol: float = RANK_TOL) -> ChannelBundle:
        env = v.codomain.sub(env).labels
        exit_labels = v.codomain.without(env).labels
        psi = channel_ket(v, tol)
        r = dynamical_operator(psi, env)
        q = transition_operator(r, v.domain.labels, tol)
        kraus, k_rank = kraus_decompose(psi, v.domain.labels, env, tol, rank_tol)
        return cls(v, psi, r, q, tuple(kraus), k_rank, v.domain.labels, exit_labels, env)

    @classmethod
    def from_kraus(cls, kraus: Sequence[np.ndarray], tol: float = TOL,
                   rank_tol: float = RANK_TOL) -> ChannelBundle:
        v = stinespring(kraus)
        if not v.is_isometry(tol):
            raise ValueError("Kraus operators do not satisfy sum K^dagger K = I")
        return cls.from_isometry(v, "f", tol, rank_tol)

    @property
    def d_a(self) -> int:
        return self.isometry.domain.total

    def invariant_residuals(self) -> dict[str, float]:
        d_a = self.d_a
        r_a = partial_trace(self.dynamical, self.entrance).matrix
        k = [m.matrix for m in self.kraus]
        completeness = sum(m.conj().T @ m for m in k)
        cross = max(
            (abs(np.trace(k[i].conj().T @ k[j])) for i in range(len(k)) for j in range(len(k)) if i != j),
            default=0.0,
        )
        kets = sum((dyad(_kraus_ket(m, d_a)).matrix for m in self.kraus), np.zeros_like(self.dynamical.matrix))
        return {
            "isometry": self.isometry.isometry_residual(),
            "trace_R": abs(self.dynamical.trace() - 1.0),
            "R_a": float(np.linalg.norm(r_a - np.eye(d_a) / d_a)),
            "Q_is_R_transposed": self.transition.distance(_transpose_labels(self.dynamical, self.entrance)),
            "kraus_completeness": float(np.linalg.norm(completeness - np.eye(d_a))),
            "kraus_orthogonality": float(cross),
            "R_from_kraus_kets": float(np.linalg.norm(kets - self.dynamical.matrix)),
            "kraus_rank_vs_rank_R": float(abs(self.kraus_rank - rank(self.dynamical))),
        }


def _kraus_ket(k: LinearMap, d_a: int) -> Ket:
    # sqrt(d_a) |kappa> = sum_j |a^j> (x) K|a^j>
    psi = ket_from_map(k)
    return Ket(psi.registry, psi.amplitudes / np.sqrt(d_a))


def apply_channel(bundle: ChannelBundle, a: Operator, route: str = "kraus") -> Operator:
    """Channel superoperator applied to ``a`` via one of three equivalent routes.

    ``isometry``: Tr_f(V A V^dagger). ``kraus``: sum_l K_l A K_l^dagger.
    ``transition``: d_a Tr_a[(A (x) I) Q]; the d_a factor compensates the
    unit-trace normalization of Q.
    """
    v = bundle.isometry
    if a.registry != v.domain:
        raise ValueError("input operator must live on the channel entrance")
    exit_reg = v.codomain.sub(bundle.exit)
    if route == "isometry":
        out = Operator(v.codomain, v.matrix @ a.matrix @ v.matrix.conj().T)
        return partial_trace(out, bundle.exit)
    if route == "kraus":
        mat = sum(k.matrix @ a.matrix @ k.matrix.conj().T for k in bundle.kraus)
        return Operator(exit_reg, mat)
    if route == "transition":
        q = bundle.transition.permute(bundle.entrance + bundle.exit)
        d_a, d_b = v.domain.total, exit_reg.total
        t = q.matrix.reshape(d_a, d_b, d_a, d_b)
        return Operator(exit_reg, d_a * np.einsum("ij,jbic->bc", a.matrix, t))
    raise ValueError(f"unknown route {route!r}; use isometry, kraus or transition")


def _standard_amplitudes(kind: str, p: float) -> tuple[np.ndarray, int]:
    """Channel-ket amplitudes psi[a, b, f] of the three textbook qubit channels."""
    if kind in ("bit_flip", "amplitude_damping"):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{kind} needs 0 <= p <= 1, got {p}")
    elif kind == "depolarizing":
        if not 0.0 <= p <= 2.0 / 3.0:
            raise ValueError(f"depolarizing needs 0 <= p <= 2/3, got {p}")
    else:
        raise ValueError(f"unknown channel kind {kind!r}; choose from {STANDARD_KINDS}")
    if kind == "bit_flip":
        psi = np.zeros((2, 2, 2))
        psi[0, 0, 0] = psi[1, 1, 0] = np.sqrt(1 - p)
        psi[0, 1, 1] = psi[1, 0, 1] = np.sqrt(p)
        return psi / np.sqrt(2), 2
    if kind == "amplitude_damping":
        # |1> decays to |0> with probability p; |11> keeps amplitude sqrt(1-p)
        psi = np.zeros((2, 2, 2))
        psi[0, 0, 0] = 1.0
        psi[1, 1, 0] = np.sqrt(1 - p)
        psi[1, 0, 1] = np.sqrt(p)
        return psi / np.sqrt(2), 2
    psi = np.zeros((2, 2, 4))
    psi[0, 0, 0] = psi[1, 1, 0] = np.sqrt(max(2 - 3 * p, 0.0))
    psi[0, 0, 1] = np.sqrt(p)
    psi[1, 1, 1] = -np.sqrt(p)
    psi[0, 1, 2] = psi[1, 0, 3] = np.sqrt(2 * p)
    return psi / 2, 4


def standard_channel(kind: str, p: float, tol: float = TOL) -> ChannelBundle:
    """Bit flip, amplitude damping or depolarizing channel with error parameter ``p``."""
    amps, d_f = _standard_amplitudes(kind, float(p))
    reg = SpaceRegistry((("a", 2), ("b", 2), ("f", d_f)))
    psi = Ket(reg, amps.ravel())
    m = map_from_ket(psi, "a")
    v = LinearMap(m.domain, m.codomain, m.matrix * np.sqrt(2))
    return ChannelBundle.from_isometry(v, "f", tol)


def pauli_correlators(bundle: ChannelBundle) -> tuple[float, float, float]:
    """<sigma^k_a sigma^k_b> = Tr[(sigma^k (x) sigma^k) Q] for k = x, y, z (qubit channels)."""
    q = bundle.transition.permute(bundle.entrance + bundle.exit)
    if q.registry.dims != (2, 2):
        raise ValueError("Pauli correlators need a qubit-to-qubit channel")
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    y = np.array([[0, -1j], [1j, 0]])
    z = np.diag([1.0 + 0j, -1.0])
    return tuple(float(np.trace(np.kron(s, s) @ q.matrix).real) for s in (x, y, z))


def mixed_env_channel(t: LinearMap, chi: Ket, entrance: str = "a", tol: float = TOL) -> Ket:
    """Channel ket (I_a (x) T (x) I_d)(|phi>_av (x) |chi>_ed) for a mixed environment.

    ``t`` maps (v, e) to (b, c) and must be unitary; ``chi`` lives on e and
    the purifying system d. The entrance dimension equals d_v.
    """
    if not t.is_unitary(tol):
        raise ValueError("T must be unitary; a non-unitary map does not preserve Psi_ad")
    if not chi.is_normalized(tol):
        raise ValueError("chi must be normalized")
    e_labels = tuple(lab for lab in t.domain.labels if lab in chi.registry)
    v_labels = tuple(lab for lab in t.domain.labels if lab not in chi.registry)
    if not e_labels or not v_labels:
        raise ValueError("T's domain must contain both the channel input v and environment labels of chi")
    d_labels = chi.registry.without(e_labels).labels
    d_v = t.domain.dim(v_labels)
    a_reg = SpaceRegistry(((entrance, d_v),))
    phi = Ket(a_reg + t.domain.sub(v_labels), np.eye(d_v).ravel() / np.sqrt(d_v))
    start = Ket(phi.registry + chi.registry, np.kron(phi.amplitudes, chi.amplitudes))
    order = (entrance,) + d_labels + t.domain.labels
    amps = start.permute(order).amplitudes.reshape(-1, t.domain.total) @ t.matrix.T
    reg = a_reg + chi.registry.sub(d_labels) + t.codomain
    return Ket(reg, amps.ravel()).permute((entrance,) + t.codomain.labels + d_labels)


# ---------------------------------------------------------------------------
# channel spec files
# ---------------------------------------------------------------------------


def _matrix_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    return decode_complex(arr) if arr.ndim == 3 else arr.astype(complex)


def channel_from_spec(spec: dict, tol: float = TOL) -> ChannelBundle:
    """Build a channel from its JSON description.

    ``{"kind": "standard", "channel": "bit_flip", "p": 0.1}``,
    ``{"kind": "isometry", "input_dim": 2, "output_dim": 2, "matrix": [...]}``
    (rows ordered exit-major, environment-minor), or
    ``{"kind": "kraus", "operators": [[...], ...]}``. Matrices are nested
    lists of reals or of [re, im] pairs.
    """
    kind = spec.get("kind")
    if kind == "standard":
        return standard_channel(spec["channel"], float(spec["p"]), tol)
    if kind == "kraus":
        return ChannelBundle.from_kraus([_matrix_from_json(k) for k in spec["operators"]], tol)
    if kind == "isometry":
        m = _matrix_from_json(spec["matrix"])
        d_a = int(spec.get("input_dim", m.shape[1]))
        d_b = int(spec["output_dim"])
        if m.shape[0] % d_b:
            raise ValueError("isometry rows are not a multiple of output_dim")
        v = LinearMap(
            SpaceRegistry((("a", d_a),)),
            SpaceRegistry((("b", d_b), ("f", m.shape[0] // d_b))),
            m,
        )
        return ChannelBundle.from_isometry(v, "f", tol)
    raise ValueError(f"unknown channel spec kind {kind!r}")


def bundle_to_json(bundle: ChannelBundle) -> dict:
    return {
        "isometry": bundle.isometry.to_json(),
        "channel_ket": bundle.channel_ket.to_json(),
        "dynamical": bundle.dynamical.to_json(),
        "transition": bundle.transition.to_json(),
        "kraus": [k.to_json() for k in bundle.kraus],
        "kraus_rank": bundle.kraus_rank,
    }
