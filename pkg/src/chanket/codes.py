"""Auditing small quantum codes: security, Knill-Laflamme, operator bases.

A code is K orthonormal codewords on n carriers labeled "1".."n". Its
channel ket is K^(-1/2) sum_j |a^j> (x) |b^j> on the entrance ``a`` plus the
carriers. The security s is the largest k such that no subset of k carriers
is correlated with ``a``.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import TOL
from .hilbert import Ket, Operator, SpaceRegistry, encode_complex, from_json, phase_fix, reduce_dyad
from .opbasis import pauli_string

ENTRANCE = "a"


def carrier_registry(dims: Sequence[int]) -> SpaceRegistry:
    return SpaceRegistry.from_dims([str(k + 1) for k in range(len(dims))], list(dims))


@dataclass(frozen=True, eq=False)
class CodeSpec:
    """Codewords stored as the columns of a (D^n x K) matrix."""

    carrier_dims: tuple[int, ...]
    codewords: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        c = np.array(self.codewords, dtype=complex, copy=True)
        dims = tuple(int(d) for d in self.carrier_dims)
        if c.ndim != 2 or c.shape[0] != int(np.prod(dims)):
            raise ValueError(f"codeword matrix shape {c.shape} does not fit carriers {dims}")
        if c.shape[1] < 1:
            raise ValueError("a code needs at least one codeword")
        if np.linalg.norm(c.conj().T @ c - np.eye(c.shape[1])) > 1e-9:
            raise ValueError("codewords are not orthonormal")
        c.setflags(write=False)
        object.__setattr__(self, "codewords", c)
        object.__setattr__(self, "carrier_dims", dims)

    @classmethod
    def from_kets(cls, kets: Sequence[Ket], name: str = "custom") -> CodeSpec:
        reg = kets[0].registry
        if any(k.registry != reg for k in kets):
            raise ValueError("codewords live on different registries")
        return cls(reg.dims, np.stack([k.amplitudes for k in kets], axis=1), name)

    @property
    def n(self) -> int:
        return len(self.carrier_dims)

    @property
    def K(self) -> int:
        return self.codewords.shape[1]

    @property
    def registry(self) -> SpaceRegistry:
        return carrier_registry(self.carrier_dims)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.registry.labels

    def codeword(self, j: int) -> Ket:
        return Ket(self.registry, self.codewords[:, j])

    def projector(self) -> Operator:
        return Operator(self.registry, self.codewords @ self.codewords.conj().T)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "carrier_dims": list(self.carrier_dims),
            "codewords": [self.codeword(j).to_json() for j in range(self.K)],
        }

    @classmethod
    def from_json(cls, data: dict) -> CodeSpec:
        kets = [from_json(k) for k in data["codewords"]]
        if not kets:
            raise ValueError("code spec lists no codewords")
        dims = tuple(data.get("carrier_dims", kets[0].registry.dims))
        if int(data.get("n", len(dims))) != len(dims):
            raise ValueError("n does not match carrier_dims")
        amps = []
        for k in kets:
            if not isinstance(k, Ket) or k.registry.dims != dims:
                raise ValueError("every codeword must be a ket on the declared carriers")
            amps.append(k.amplitudes)
        return cls(dims, np.stack(amps, axis=1), data.get("name", "custom"))


FIVE_QUBIT_STABILIZERS = ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")
_PAULI = {"I": 0, "X": 1, "Y": 2, "Z": 3}


def _five_qubit_codewords() -> np.ndarray:
    proj = np.eye(32, dtype=complex)
    for g in FIVE_QUBIT_STABILIZERS:
        proj = proj @ (np.eye(32) + pauli_string([_PAULI[c] for c in g], [2] * 5)) / 2
    cols = []
    for start in (0, 31):
        v = proj[:, start]
        cols.append(phase_fix(v / np.linalg.norm(v)))
    return np.stack(cols, axis=1)


def builtin_code(name: str) -> CodeSpec:
    if name == "repetition3":
        c = np.zeros((8, 2), dtype=complex)
        c[0, 0] = c[7, 1] = 1.0
        return CodeSpec((2, 2, 2), c, name)
    if name == "five_qubit":
        return CodeSpec((2,) * 5, _five_qubit_codewords(), name)
    if name == "trivial1":
        # one-dimensional code on one qubit: nothing to leak
        return CodeSpec((2,), np.array([[1.0], [0.0]]), name)
    raise ValueError(f"unknown builtin code {name!r}; choose repetition3 or five_qubit")


def code_channel_ket(code: CodeSpec) -> Ket:
    reg = SpaceRegistry(((ENTRANCE, code.K),)) + code.registry
    amps = code.codewords.T / np.sqrt(code.K)  # row j is the codeword for |a^j>
    return Ket(reg, amps.ravel())


# ---------------------------------------------------------------------------
# security
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SecurityReport:
    s: int
    max_check: int
    capped: bool  # True when every checked size passed, so s is only a lower bound
    route1_s: int
    route2_s: int
    residuals: dict  # subset -> (route 1 residual, route 2 residual)
    witness: dict | None = None

    @property
    def distance(self) -> int:
        return self.s + 1

    def to_json(self) -> dict:
        out = {
            "s": self.s,
            "distance_label": self.distance,
            "max_check": self.max_check,
            "capped": self.capped,
            "route_factorization_s": self.route1_s,
            "route_matrix_s": self.route2_s,
            "subsets": [
                {"carriers": list(u), "factorization_residual": r1, "matrix_residual": r2}
                for u, (r1, r2) in sorted(self.residuals.items(), key=lambda kv: (len(kv[0]), kv[0]))
            ],
        }
        if self.witness is not None:
            w = self.witness
            out["witness"] = {
                "carriers": list(w["carriers"]),
                "operator_name": w["operator_name"],
                "operator": w["operator"].to_json(),
                "codeword_matrix": encode_complex(w["codeword_matrix"]),
                "residual": w["residual"],
            }
        return out


def _subset_dyads(code: CodeSpec, u: tuple[str, ...]) -> np.ndarray:
    """G[j, k] = Tr_rest |b^k><b^j| on the carriers ``u`` (so <b^j|F|b^k> = Tr(F G[j, k]))."""
    words = [code.codeword(j) for j in range(code.K)]
    return np.array([[reduce_dyad(words[k], words[j], u) for k in range(code.K)] for j in range(code.K)])


def _basis_tensors(dims: Sequence[int]):
    for idx in itertools.product(*[range(max(d * d, 1)) for d in dims]):
        yield idx, pauli_string(idx, dims)


def _op_name(idx, dims) -> str:
    return "".join("IXYZ"[j] if d == 2 else f"g{j}." for j, d in zip(idx, dims))


def _matrix_route(code: CodeSpec, u: tuple[str, ...]):
    """max over basis tensors F on u of ||<b^j|F|b^k> - (tr/K) delta_jk||, and the worst F."""
    g = _subset_dyads(code, u)
    dims = code.registry.sub(u).dims
    worst = (0.0, None, None, None)
    eye = np.eye(code.K)
    for idx, f in _basis_tensors(dims):
        m = np.einsum("xy,jkyx->jk", f, g)
        r = float(np.linalg.norm(m - np.trace(m) / code.K * eye))
        if r > worst[0]:
            worst = (r, idx, f, m)
    return worst


def _factorization_route(psi: Ket, u: tuple[str, ...]) -> float:
    from .hilbert import partial_trace

    keep = (ENTRANCE,) + u
    rho = partial_trace(psi, keep).permute(keep).matrix
    rho_a = partial_trace(psi, ENTRANCE).matrix
    rho_u = partial_trace(psi, u).permute(u).matrix
    return float(np.linalg.norm(rho - np.kron(rho_a, rho_u)))


def default_max_check(code: CodeSpec) -> int:
    # one size beyond the expected security so that a failing witness is found
    return code.n if code.K == 1 else min(code.n, code.n // 2 + 1)


def security(code: CodeSpec, max_check: int | None = None, tol: float = TOL,
             jobs: int = 1) -> SecurityReport:
    """Security by two routes: a-u factorization of the channel ket, and the
    codeword matrices of every Hermitian basis tensor on u."""
    if max_check is None:
        max_check = default_max_check(code)
    if not 0 <= max_check <= code.n:
        raise ValueError(f"max_check must lie in [0, {code.n}]")
    psi = code_channel_ket(code)
    residuals: dict = {}
    s1 = s2 = None
    witness = None

    def check(u):
        return u, _factorization_route(psi, u), _matrix_route(code, u)

    pool = ThreadPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        for k in range(1, max_check + 1):
            subsets = list(itertools.combinations(code.labels, k))
            results = list(pool.map(check, subsets)) if pool else [check(u) for u in subsets]
            fail1 = fail2 = False
            for u, r1, (r2, idx, f, m) in results:
                residuals[u] = (r1, r2)
                fail1 |= r1 > tol
                if r2 > tol:
                    fail2 = True
                    if witness is None:
                        dims = code.registry.sub(u).dims
                        witness = {
                            "carriers": u,
                            "operator_name": _op_name(idx, dims),
                            "operator": Operator(code.registry.sub(u), f),
                            "codeword_matrix": m,
                            "residual": r2,
                        }
            if fail1 and s1 is None:
                s1 = k - 1
            if fail2 and s2 is None:
                s2 = k - 1
            if s1 is not None and s2 is not None:
                break
    finally:
        if pool:
            pool.shutdown()
    capped = s1 is None and s2 is None
    s1 = max_check if s1 is None else s1
    s2 = max_check if s2 is None else s2
    if s1 != s2:
        raise RuntimeError(f"security routes disagree: factorization gives {s1}, matrix test gives {s2}")
    return SecurityReport(s1, max_check, capped, s1, s2, residuals, witness)


# ---------------------------------------------------------------------------
# Knill-Laflamme and friends
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class KLReport:
    passes: bool
    b_matrix: np.ndarray
    residual: float
    worst_pair: tuple[int, int] | None = None
    error_names: tuple[str, ...] = field(default_factory=tuple)

    def to_json(self) -> dict:
        return {
            "passes": self.passes,
            "residual": self.residual,
            "worst_pair": None if self.worst_pair is None else list(self.worst_pair),
            "errors": list(self.error_names),
            "b_matrix": encode_complex(self.b_matrix),
        }


def _error_matrix(e, total: int) -> np.ndarray:
    m = np.asarray(getattr(e, "matrix", e), dtype=complex)
    if m.shape != (total, total):
        raise ValueError(f"error operator shape {m.shape} does not act on the carriers ({total})")
    return m


def knill_laflamme(code: CodeSpec, errors: Sequence, tol: float = TOL,
                   names: Sequence[str] | None = None) -> KLReport:
    """<b^j|K_l^dagger K_m|b^k> = b_lm delta_jk for all l, m."""
    total = code.codewords.shape[0]
    c = code.codewords
    images = [_error_matrix(e, total) @ c for e in errors]
    n_err = len(images)
    b = np.zeros((n_err, n_err), dtype=complex)
    residual, worst = 0.0, None
    eye = np.eye(code.K)
    for l in range(n_err):
        for m in range(n_err):
            mat = images[l].conj().T @ images[m]
            b[l, m] = np.trace(mat) / code.K
            r = float(np.linalg.norm(mat - b[l, m] * eye))
            if r > residual:
                residual, worst = r, (l, m)
    return KLReport(residual <= tol, b, residual, worst, tuple(names or ()))


def _single_site_errors(code: CodeSpec, which: Sequence[int], t: int = 1):
    dims = code.carrier_dims
    ops, names = [np.eye(code.codewords.shape[0], dtype=complex)], ["I" * code.n]
    for sites in itertools.chain.from_iterable(itertools.combinations(range(code.n), w) for w in range(1, t + 1)):
        choices = [[j for j in range(1, max(dims[s] ** 2, 1)) if which is None or j in which] for s in sites]
        for pick in itertools.product(*choices):
            idx = [0] * code.n
            for s, j in zip(sites, pick):
                idx[s] = j
            ops.append(pauli_string(idx, dims))
            names.append(_op_name(idx, dims))
    return ops, names


def error_set(code: CodeSpec, kind: str, t: int = 1) -> tuple[list[np.ndarray], list[str]]:
    """``bitflip`` (I, X_i), ``phaseflip`` (I, Z_i) or ``pauli1``/``general`` (all basis strings of weight <= t)."""
    if kind == "bitflip":
        return _single_site_errors(code, [1])
    if kind == "phaseflip":
        return _single_site_errors(code, [3])
    if kind in ("pauli1", "general"):
        return _single_site_errors(code, None, 1 if kind == "pauli1" else t)
    raise ValueError(f"unknown error set {kind!r}")


def s_equals_2t_check(code: CodeSpec, t: int, tol: float = TOL) -> bool:
    """security >= 2t and the code corrects every basis error of weight <= t."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return True
    if 2 * t > code.n:
        return False
    report = security(code, max_check=2 * t, tol=tol)
    if report.s < 2 * t:
        return False
    ops, _ = error_set(code, "general", t)
    return knill_laflamme(code, ops, tol).passes


def operator_base(f: Operator, tol: float = TOL) -> tuple[str, ...]:
    """Smallest set of carriers w with F = F_w (x) I on the rest."""
    from .hilbert import embed, partial_trace

    reg = f.registry
    base = []
    for lab in reg.labels:
        rest = reg.without(lab)
        if not rest.labels:
            reduced = np.eye(1) * np.trace(f.matrix) / reg.total
            rebuilt = reduced * np.eye(reg.total)
        else:
            reduced = partial_trace(f, rest.labels).matrix / reg.dim(lab)
            rebuilt = embed(reduced, rest, reg)
        if np.linalg.norm(rebuilt - f.matrix) > tol:
            base.append(lab)
    return tuple(base)


def singleton_check(n: int, t: int, K: int, D: int) -> bool:
    """n >= 4t + log K / log D, evaluated exactly as D^(n - 4t) >= K."""
    if K < 1 or D < 2 or t < 0:
        raise ValueError("need K >= 1, D >= 2, t >= 0")
    e = n - 4 * t
    if e < 0:
        return False
    return D**e >= K


def singleton_is_tight(n: int, t: int, K: int, D: int) -> bool:
    e = n - 4 * t
    return e >= 0 and D**e == K
