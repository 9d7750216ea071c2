"""Where information about a subsystem lives, for states and channels.

A pre-probability is a pure state, a density operator, or a channel. For a
channel the joint distribution of an entrance decomposition A and an exit
decomposition B is Tr[(A (x) B) Q]. Since Q is R partially transposed on the
entrance, every presence or absence question about a channel is answered on
the channel ket with the entrance projectors transposed.

Verdicts are ``present`` or ``absent`` only when the defining relation holds
within ``tol``; otherwise ``neither``, with the residual reported.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channel import ChannelBundle
from .config import LOG_BASE, RANK_TOL, TOL
from .hilbert import (
    Decomposition,
    Ket,
    Labels,
    Operator,
    SpaceRegistry,
    _as_labels,
    _herm,
    partial_trace,
    reduce_dyad,
    support_and_rank,
    von_neumann_entropy,
)
from .opbasis import pauli_string

PRESENT, ABSENT, NEITHER = "present", "absent", "neither"


@dataclass(frozen=True, eq=False)
class PreProbability:
    kind: str  # "pure", "density" or "channel"
    payload: Ket | Operator
    bundle: ChannelBundle | None = None

    @classmethod
    def pure(cls, ket: Ket, tol: float = TOL) -> PreProbability:
        if not ket.is_normalized(tol):
            raise ValueError("pure pre-probability must be normalized")
        return cls("pure", ket)

    @classmethod
    def density(cls, rho: Operator, tol: float = TOL) -> PreProbability:
        if not rho.is_density(tol):
            raise ValueError("density pre-probability must be positive with unit trace")
        return cls("density", rho)

    @classmethod
    def channel(cls, bundle: ChannelBundle) -> PreProbability:
        return cls("channel", bundle.transition, bundle)

    @property
    def registry(self) -> SpaceRegistry:
        # channels are analysed on their channel ket, which includes the environment
        return self.bundle.channel_ket.registry if self.bundle else self.payload.registry

    @property
    def is_pure(self) -> bool:
        return self.kind in ("pure", "channel")

    @property
    def state(self) -> Ket | Operator:
        """Ket or density operator on which verdicts are computed."""
        return self.bundle.channel_ket if self.bundle else self.payload

    def reduced(self, keep: Labels) -> Operator:
        return partial_trace(self.state, keep)

    def adapt(self, dec: Decomposition) -> Decomposition:
        """Transpose entrance decompositions of a channel; identity otherwise."""
        if self.bundle is not None and set(dec.labels) & set(self.bundle.entrance):
            if tuple(dec.labels) != self.bundle.entrance:
                raise ValueError("channel decompositions must cover exactly the entrance")
            return dec.transposed()
        return dec


def _as_pp(pp) -> PreProbability:
    if isinstance(pp, PreProbability):
        return pp
    if isinstance(pp, Ket):
        return PreProbability.pure(pp)
    if isinstance(pp, Operator):
        return PreProbability.density(pp)
    if isinstance(pp, ChannelBundle):
        return PreProbability.channel(pp)
    raise TypeError(f"cannot use {type(pp).__name__} as a pre-probability")


@dataclass(frozen=True, eq=False)
class ProbTable:
    rows: tuple[str, ...]
    cols: tuple[str, ...]
    matrix: np.ndarray

    @property
    def row_marginal(self) -> np.ndarray:
        return self.matrix.sum(axis=1)

    @property
    def col_marginal(self) -> np.ndarray:
        return self.matrix.sum(axis=0)

    @property
    def total(self) -> float:
        return float(self.matrix.sum())

    def is_independent(self, tol: float = TOL) -> bool:
        return bool(np.abs(self.matrix - np.outer(self.row_marginal, self.col_marginal)).max() <= tol)

    def to_json(self) -> dict:
        return {"rows": list(self.rows), "cols": list(self.cols), "matrix": self.matrix.tolist()}


def _joint_matrix(rho: Operator, a: Decomposition, b: Decomposition) -> np.ndarray:
    """Pr(A^j, B^k) = Tr[(A^j (x) B^k) rho] with rho on exactly a + b."""
    da, db = a.registry.total, b.registry.total
    r = rho.permute(a.labels + b.labels).matrix.reshape(da, db, da, db)
    return np.einsum("jxz,kyw,zwxy->jk", a.stack(), b.stack(), r).real


def _clamp(p: np.ndarray, tol: float) -> np.ndarray:
    if p.min(initial=0.0) < -tol:
        raise ValueError(f"negative probability {p.min():.3g}")
    return np.where(p < 0, 0.0, p)


def joint_distribution(pp, a: Decomposition, b: Decomposition, tol: float = TOL) -> ProbTable:
    pp = _as_pp(pp)
    if set(a.labels) & set(b.labels):
        raise ValueError("decompositions must act on distinct subsystems")
    if pp.bundle is not None:
        bd = pp.bundle
        if tuple(a.labels) != bd.entrance or not set(b.labels) <= set(bd.exit):
            raise ValueError("channel distributions need A on the entrance and B on the exit")
        q = partial_trace(bd.transition, a.labels + b.labels)
        p = _joint_matrix(q, a, b)
    else:
        p = _joint_matrix(pp.reduced(a.labels + b.labels), a, b)
    p = _clamp(p, tol)
    if abs(p.sum() - 1.0) > max(tol, 1e-9):
        raise ValueError(f"probabilities sum to {p.sum():.6g}")
    return ProbTable(a.labels, b.labels, p)


def _entropy_bits(p: np.ndarray, base: float) -> float:
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)) / np.log(base))


def mutual_information(t: ProbTable, base: float = LOG_BASE) -> float:
    m = t.matrix
    value = _entropy_bits(t.row_marginal, base) + _entropy_bits(t.col_marginal, base) - _entropy_bits(m.ravel(), base)
    return max(value, 0.0)


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class InfoVerdict:
    verdict: str
    residual: float
    witness: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def present(self) -> bool:
        return self.verdict == PRESENT

    @property
    def absent(self) -> bool:
        return self.verdict == ABSENT

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "residual": float(self.residual),
            "witness": _jsonable(self.witness),
            "details": _jsonable(self.details),
        }


def _jsonable(x):
    if hasattr(x, "to_json"):
        return x.to_json()
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    return x


def _lambdas(pp: PreProbability, a: Decomposition, target: tuple[str, ...]) -> list[Operator]:
    """Lambda^l = Tr_a[(A^l (x) I) rho_{a, target}] for every projector of ``a``."""
    if set(a.labels) & set(target):
        raise ValueError("target must be disjoint from the decomposed subsystem")
    dec = pp.adapt(a)
    rho = pp.reduced(dec.labels + target).permute(dec.labels + target)
    da = dec.registry.total
    tgt = rho.registry.sub(target)
    r = rho.matrix.reshape(da, tgt.total, da, tgt.total)
    lam = np.einsum("lxz,zyxw->lyw", dec.stack(), r)
    return [Operator(tgt, _herm(m)) for m in lam]


def _target(pp: PreProbability, target: Labels) -> tuple[str, ...]:
    return pp.registry.sub(target).labels


def _witness(lams: list[Operator], tol: float, rank_tol: float) -> Decomposition:
    """Projectors B^l onto the (orthogonal) supports of Lambda^l; leftovers go to B^0."""
    reg = lams[0].registry
    total = np.zeros((reg.total, reg.total), dtype=complex)
    for l, lam in enumerate(lams):
        if abs(lam.trace()) > tol:
            proj, _ = support_and_rank(lam, tol, rank_tol)
            total += l * proj.matrix
    w, v = np.linalg.eigh(_herm(total))
    idx = np.clip(np.rint(w).astype(int), 0, len(lams) - 1)
    projs = []
    for l in range(len(lams)):
        vl = v[:, idx == l]
        projs.append(vl @ vl.conj().T)
    return Decomposition(reg, tuple(projs))


def info_present(pp, a: Decomposition, target: Labels, tol: float = TOL,
                 rank_tol: float = RANK_TOL) -> InfoVerdict:
    """Is the ``a`` information perfectly present in ``target``?

    Decided by pairwise orthogonality of Lambda^l = Tr_a(A^l rho). On success
    the witness holds a decomposition {B^k} of the target with
    <A^j B^k> = delta_jk <A^j>, plus the Lambda operators.
    """
    pp = _as_pp(pp)
    target = _target(pp, target)
    lams = _lambdas(pp, a, target)
    residual = 0.0
    for l in range(len(lams)):
        for m in range(l + 1, len(lams)):
            residual = max(residual, float(np.linalg.norm(lams[l].matrix @ lams[m].matrix)))
    if residual > tol:
        return InfoVerdict(NEITHER, residual, {"Lambda": lams})
    b = _witness(lams, tol, rank_tol)
    probs = np.array([lam.trace().real for lam in lams])
    joint = np.einsum("kxy,lyx->lk", b.stack(), np.stack([lam.matrix for lam in lams])).real
    check = float(np.abs(joint - np.diag(probs)).max())
    return InfoVerdict(
        PRESENT if check <= tol else NEITHER,
        max(residual, check),
        {"B": b, "Lambda": lams},
        {"witness_residual": check, "probabilities": probs},
    )


def commutator_residual(pp, a: Decomposition) -> float:
    """max_l ||[A^l, Psi_a]||; zero iff the ``a`` information is in the rest (pure states)."""
    pp = _as_pp(pp)
    if not pp.is_pure:
        raise ValueError("the commutator test applies to pure pre-probabilities")
    dec = pp.adapt(a)
    psi_a = pp.reduced(dec.labels).permute(dec.labels).matrix
    return float(max(np.linalg.norm(p @ psi_a - psi_a @ p) for p in dec.projectors))


def _trace_norm(m: np.ndarray) -> float:
    return float(np.abs(np.linalg.eigvalsh(_herm(m))).sum())


def info_absent(pp, a: Decomposition, target: Labels, tol: float = TOL,
                rank_tol: float = RANK_TOL) -> InfoVerdict:
    """Is the ``a`` information completely absent from ``target``?

    Residual is the largest trace distance between a conditional state
    Tr_a(A^j rho)/p_j (only for p_j > tol) and the target's reduced state.
    For a pure state with target equal to the rest of the system the
    support condition P A^l P = a_l P is evaluated as a cross-check.
    """
    pp = _as_pp(pp)
    target = _target(pp, target)
    lams = _lambdas(pp, a, target)
    rho_c = sum((lam.matrix for lam in lams), np.zeros_like(lams[0].matrix))
    probs = np.array([lam.trace().real for lam in lams])
    residual = max(
        (_trace_norm(lam.matrix / pj - rho_c) for lam, pj in zip(lams, probs) if pj > tol),
        default=0.0,
    )
    details: dict = {"probabilities": probs}
    rest = pp.registry.without(a.labels + target).labels
    if pp.is_pure and not rest:
        dec = pp.adapt(a)
        psi_a = pp.reduced(dec.labels).permute(dec.labels)
        proj, r = support_and_rank(psi_a, tol, rank_tol)
        coeffs = np.array([np.trace(proj.matrix @ p).real / r for p in dec.projectors])
        details["support_residual"] = float(max(
            np.linalg.norm(proj.matrix @ p @ proj.matrix - c * proj.matrix)
            for p, c in zip(dec.projectors, coeffs)
        ))
        details["support_constants"] = coeffs
    verdict = ABSENT if residual <= tol else NEITHER
    return InfoVerdict(verdict, residual, {"constants": probs}, details)


def _product_residual(pp: PreProbability, a: tuple[str, ...], c: tuple[str, ...]) -> float:
    if not c:
        return 0.0
    rho_ac = pp.reduced(a + c).permute(a + c).matrix
    rho_a = pp.reduced(a).permute(a).matrix
    rho_c = pp.reduced(c).permute(c).matrix
    return float(np.linalg.norm(rho_ac - np.kron(rho_a, rho_c)))


def all_info_absent(pp, a: Labels, c: Labels, tol: float = TOL) -> InfoVerdict:
    """All information about ``a`` is absent from ``c`` iff rho_ac = rho_a (x) rho_c."""
    pp = _as_pp(pp)
    a, c = pp.registry.sub(a).labels, pp.registry.sub(c).labels
    if set(a) & set(c):
        raise ValueError("subsystems must be disjoint")
    residual = _product_residual(pp, a, c)
    return InfoVerdict(ABSENT if residual <= tol else NEITHER, residual)


def _maximally_mixed_residual(pp: PreProbability, a: tuple[str, ...]) -> float:
    rho_a = pp.reduced(a).matrix
    return float(np.linalg.norm(rho_a - np.eye(rho_a.shape[0]) / rho_a.shape[0]))


def all_info_present(pp, a: Labels, b: Labels,
                     decompositions: Sequence[Decomposition] | None = None,
                     tol: float = TOL) -> InfoVerdict:
    """Is all information about ``a`` present in ``b``?

    Pure states and channels: present iff Psi_a = I/d_a and the rest c of
    the system is uncorrelated with ``a`` (for c empty this is the usual
    maximal-entanglement test). Density operators need two strongly
    incompatible decompositions of ``a``; the verdict is then present iff
    both kinds of information are present in ``b`` and rho_a = I/d_a.
    """
    pp = _as_pp(pp)
    a, b = pp.registry.sub(a).labels, pp.registry.sub(b).labels
    if set(a) & set(b):
        raise ValueError("subsystems must be disjoint")
    c = pp.registry.without(a + b).labels
    details: dict = {}
    if decompositions is not None:
        decs = list(decompositions)
        if len(decs) != 2:
            raise ValueError("the two-decomposition route takes exactly two decompositions")
        verdicts = [info_present(pp, d, b, tol) for d in decs]
        details.update(
            strongly_incompatible=strongly_incompatible(decs[0], decs[1], tol),
            decomposition_residuals=[v.residual for v in verdicts],
            maximally_mixed_residual=_maximally_mixed_residual(pp, a),
        )
    if pp.is_pure:
        mm = _maximally_mixed_residual(pp, a)
        prod = _product_residual(pp, a, c)
        residual = max(mm, prod)
        details.update(maximally_mixed_residual=mm, complement_product_residual=prod)
        return InfoVerdict(PRESENT if residual <= tol else NEITHER, residual, {}, details)
    if decompositions is None:
        raise ValueError("density operators need two strongly incompatible decompositions")
    if not details["strongly_incompatible"]:
        raise ValueError("the supplied decompositions are not strongly incompatible")
    residual = max(details["decomposition_residuals"] + [details["maximally_mixed_residual"]])
    return InfoVerdict(PRESENT if residual <= tol else NEITHER, residual, {}, details)


def strongly_incompatible(first: Decomposition, second: Decomposition, tol: float = TOL) -> bool:
    """True iff only multiples of I commute with every projector of both decompositions."""
    if first.registry != second.registry:
        raise ValueError("decompositions live on different subsystems")
    d = first.registry.total
    eye = np.eye(d)
    # row-major vec: vec(X P - P X) = (I (x) P^T - P (x) I) vec(X)
    blocks = [np.kron(eye, p.T) - np.kron(p, eye) for p in first.projectors + second.projectors]
    s = np.linalg.svd(np.vstack(blocks), compute_uv=False)
    null_dim = int(np.count_nonzero(s <= tol * max(1.0, s[0])))
    return null_dim == 1


# ---------------------------------------------------------------------------
# hidden product structure
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Factorization:
    """|Psi> = |chi>_{a d} (x) |psi>_{c e}, with H_d (x) H_e embedded in H_b.

    ``embedding`` has orthonormal columns |b^{jk}> = |d^j> (x) |e^k>, indexed
    j * d_e + k. When the precondition fails only the residuals are set.
    """

    ok: bool
    residual: float
    precondition_residual: float
    embedding: np.ndarray | None = None
    chi: Ket | None = None
    psi: Ket | None = None
    orthonormality_residual: float = 0.0

    def to_json(self) -> dict:
        out = {
            "ok": self.ok,
            "residual": self.residual,
            "precondition_residual": self.precondition_residual,
            "orthonormality_residual": self.orthonormality_residual,
        }
        if self.ok:
            from .hilbert import encode_complex

            out.update(embedding=encode_complex(self.embedding), chi=self.chi.to_json(), psi=self.psi.to_json())
        return out


def _fresh_label(base: str, taken) -> str:
    label = base
    while label in taken:
        label += "'"
    return label


def _eig_desc(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(_herm(m))
    order = np.argsort(-w, kind="stable")
    return np.clip(w[order], 0.0, None), v[:, order]


def hidden_product_factorize(psi: Ket, a: Labels, c: Labels, tol: float = TOL,
                             rank_tol: float = RANK_TOL, labels: tuple[str, str] = ("d", "e")) -> Factorization:
    """Split a pure state on abc whose a and c are uncorrelated into two entangled pairs."""
    reg = psi.registry
    a, c = reg.sub(a).labels, reg.sub(c).labels
    b = reg.without(a + c).labels
    pp = PreProbability("pure", psi)
    pre = _product_residual(pp, a, c)
    if pre > tol:
        return Factorization(False, pre, pre)
    da, db, dc = reg.dim(a), reg.dim(b), reg.dim(c)
    t = psi.permute(a + b + c).amplitudes.reshape(da, db, dc)
    p, ua = _eig_desc(pp.reduced(a).permute(a).matrix)
    q, uc = _eig_desc(pp.reduced(c).permute(c).matrix)
    jset = p > rank_tol * p[0]
    kset = q > rank_tol * q[0]
    p, ua, q, uc = p[jset], ua[:, jset], q[kset], uc[:, kset]
    beta = np.einsum("xj,xbz,zk->jkb", ua.conj(), t, uc.conj())
    bjk = beta / np.sqrt(np.outer(p, q))[:, :, None]
    w = bjk.reshape(-1, db).T
    ortho = float(np.linalg.norm(w.conj().T @ w - np.eye(w.shape[1])))
    taken = set(reg.labels)
    ld = _fresh_label(labels[0], taken)
    le = _fresh_label(labels[1], taken | {ld})
    chi = Ket(reg.sub(a) + SpaceRegistry(((ld, p.size),)), (ua * np.sqrt(p)).ravel())
    psi_ce = Ket(reg.sub(c) + SpaceRegistry(((le, q.size),)), (uc * np.sqrt(q)).ravel())
    # rebuild on (a, b, c) from chi, psi and the embedding
    rebuilt = np.einsum("xj,bjk,zk->xbz", ua * np.sqrt(p), w.reshape(db, p.size, q.size), uc * np.sqrt(q))
    residual = float(np.linalg.norm(rebuilt - t))
    ok = residual <= tol and ortho <= tol
    return Factorization(ok, max(residual, ortho), pre, w, chi, psi_ce, ortho)


# ---------------------------------------------------------------------------
# CQ channels
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CQReport:
    is_cq: bool
    basis: np.ndarray | None  # columns |a^j>
    blocks: tuple[Operator, ...]
    commutator_residual: float
    reassembly_residual: float

    def to_json(self) -> dict:
        from .hilbert import encode_complex

        return {
            "is_cq": self.is_cq,
            "basis": None if self.basis is None else encode_complex(self.basis),
            "blocks": [b.to_json() for b in self.blocks],
            "commutator_residual": self.commutator_residual,
            "reassembly_residual": self.reassembly_residual,
        }


def _split_blocks(blocks: list[np.ndarray], m: np.ndarray, tol: float) -> list[np.ndarray]:
    out = []
    for v in blocks:
        if v.shape[1] == 1:
            out.append(v)
            continue
        w, u = np.linalg.eigh(_herm(v.conj().T @ m @ v))
        start = 0
        for k in range(1, w.size + 1):
            if k == w.size or w[k] - w[k - 1] > tol:
                out.append(v @ u[:, start:k])
                start = k
    return out


def cq_structure(r: Operator, entrance: Labels = "a", tol: float = TOL) -> CQReport:
    """Test R = (1/d_a) sum_j [a^j] (x) B^j and recover the basis and the B^j."""
    if not r.is_density(tol):
        raise ValueError("R must be a density operator")
    a = r.registry.sub(entrance).labels
    b = r.registry.without(a).labels
    if not b:
        raise ValueError("R needs an exit subsystem")
    da, db = r.registry.dim(a), r.registry.dim(b)
    r4 = r.permute(a + b).matrix.reshape(da, db, da, db)
    bdims = r.registry.sub(b).dims
    family = []
    for idx in np.ndindex(*[max(d * d, 1) for d in bdims]):
        s = pauli_string(idx, bdims)
        family.append(np.einsum("wy,iyjw->ij", s, r4) / db)
    comm = max(
        (float(np.linalg.norm(x @ y - y @ x)) for i, x in enumerate(family) for y in family[i + 1:]),
        default=0.0,
    )
    if comm > tol:
        return CQReport(False, None, (), comm, float("nan"))
    blocks = [np.eye(da, dtype=complex)]
    split_tol = max(np.sqrt(tol), 1e-7)
    for x in family:
        blocks = _split_blocks(blocks, x, split_tol)
    basis = np.hstack(blocks)
    breg = r.registry.sub(b)
    bs = [Operator(breg, _herm(da * np.einsum("i,iyjw,j->yw", basis[:, j].conj(), r4, basis[:, j])))
          for j in range(da)]
    rebuilt = sum(np.kron(np.outer(basis[:, j], basis[:, j].conj()), bs[j].matrix) for j in range(da)) / da
    err = float(np.linalg.norm(rebuilt - r4.reshape(da * db, da * db)))
    valid = all(bj.is_positive(tol) and abs(bj.trace() - 1.0) <= tol for bj in bs)
    return CQReport(err <= tol and valid, basis, tuple(bs), comm, err)


# ---------------------------------------------------------------------------
# four-kets identity and the entropy chain
# ---------------------------------------------------------------------------


def four_kets_sides(e: Ket, f: Ket, g: Ket, h: Ket, a: Labels) -> tuple[complex, complex, complex]:
    """(Tr_a D^ef_a D^gh_a, Tr_b D^eh_b D^gf_b, sum_jk <f^k|e^j><h^j|g^k>)."""
    reg = e.registry
    for k in (f, g, h):
        if k.registry != reg:
            raise ValueError("all four kets must share one registry")
    a = reg.sub(a).labels
    b = reg.without(a).labels
    lhs = np.trace(reduce_dyad(e, f, a) @ reduce_dyad(g, h, a))
    rhs = np.trace(reduce_dyad(e, h, b) @ reduce_dyad(g, f, b))
    em, fm, gm, hm = (k.as_matrix(a) for k in (e, f, g, h))
    third = np.einsum("kb,jb,jc,kc->", fm.conj(), em, hm.conj(), gm)
    return complex(lhs), complex(rhs), complex(third)


def four_kets_residual(e: Ket, f: Ket, g: Ket, h: Ket, a: Labels) -> float:
    lhs, rhs, _ = four_kets_sides(e, f, g, h, a)
    return abs(lhs - rhs)


@dataclass(frozen=True)
class EntropyChain:
    entropies: dict
    a_c_equality: float  # |S(a) + S(c) - S(ac)|
    purity_equality: float  # |S(ac) - S(bd)|
    subadditivity: float  # S(bd) - S(b) - S(d), should be <= 0
    swapped: float  # S(a) + S(d) - S(b) - S(c), should be <= 0
    conclusion: float  # S(a) - S(b), should be <= 0
    ok: bool

    def to_json(self) -> dict:
        return {k: (v if not isinstance(v, float) else float(v)) for k, v in self.__dict__.items()}


def entropy_chain(psi: Ket, a: Labels, b: Labels, c: Labels, d: Labels, tol: float = TOL,
                  base: float = LOG_BASE) -> EntropyChain:
    """Entropy bookkeeping behind the bound d_a <= d_b, for a pure state on abcd.

    Assumes a is uncorrelated with c and with d (all of its information
    sitting in bc and in bd). Reports each step's slack; ``ok`` means every
    equality holds and every inequality is satisfied within ``tol``.
    """
    reg = psi.registry
    groups = {k: reg.sub(v).labels for k, v in dict(a=a, b=b, c=c, d=d).items()}
    if sum(len(v) for v in groups.values()) != len(reg) or len(set().union(*groups.values())) != len(reg):
        raise ValueError("a, b, c, d must partition the registry")

    def s(*names):
        labs = tuple(lab for n in names for lab in groups[n])
        return von_neumann_entropy(partial_trace(psi, labs), base, tol)

    ent = {"a": s("a"), "b": s("b"), "c": s("c"), "d": s("d"), "ac": s("a", "c"), "bd": s("b", "d")}
    eq1 = abs(ent["a"] + ent["c"] - ent["ac"])
    eq2 = abs(ent["ac"] - ent["bd"])
    sub = ent["bd"] - ent["b"] - ent["d"]
    swapped = ent["a"] + ent["d"] - ent["b"] - ent["c"]
    concl = ent["a"] - ent["b"]
    ok = eq1 <= tol and eq2 <= tol and sub <= tol and swapped <= tol and concl <= tol
    return EntropyChain(ent, eq1, eq2, sub, swapped, concl, ok)
