"""Seeded property suites for the all-or-nothing statements and the channel laws.

Every suite draws half of its instances from a construction that satisfies
the hypothesis of the statement under test and half at random, then checks
the stated implication or equivalence on each. Results are deterministic for
a given seed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .channel import ChannelBundle, LinearMap, apply_channel, mixed_env_channel, standard_channel
from .config import TOL
from .hilbert import Decomposition, Ket, Operator, SpaceRegistry, partial_trace, tensor
from .infoloc import (
    PreProbability,
    all_info_absent,
    all_info_present,
    commutator_residual,
    cq_structure,
    four_kets_sides,
    hidden_product_factorize,
    info_absent,
    info_present,
    strongly_incompatible,
)
from .sampling import (
    complex_normal,
    maximally_entangled,
    random_basis,
    random_density,
    random_isometry,
    random_ket,
    random_unitary,
    rotated_fourier_basis,
)


@dataclass
class SuiteResult:
    name: str
    instances: int = 0
    failures: int = 0
    max_residual: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.instances > 0 and self.failures == 0

    def record(self, ok: bool, residual: float = 0.0, note: str | None = None):
        self.instances += 1
        self.max_residual = max(self.max_residual, float(residual))
        if not ok:
            self.failures += 1
            if note and len(self.notes) < 5:
                self.notes.append(note)

    def to_json(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "instances": self.instances,
            "failures": self.failures,
            "max_residual": self.max_residual,
            "notes": list(self.notes),
        }


def _reg(**dims) -> SpaceRegistry:
    return SpaceRegistry(tuple(dims.items()))


def _sizes(rng, lo=2, hi=3):
    return int(rng.integers(lo, hi + 1))


def _block_schmidt_ket(basis: np.ndarray, reg_a: SpaceRegistry, rest: SpaceRegistry, rng,
                       block_labels: tuple[str, ...] | None = None) -> Ket:
    """sum_j |a^j> (x) |beta^j>, the beta^j supported on disjoint blocks of the first rest factor."""
    da = reg_a.total
    first = rest.labels[0] if block_labels is None else block_labels[0]
    d_first = rest.dim(first)
    other = rest.without(first)
    mat = np.zeros((da, d_first, other.total), dtype=complex)
    blocks = np.array_split(rng.permutation(d_first), da)
    for j, blk in enumerate(blocks):
        mat[j, blk, :] = complex_normal(rng, (len(blk), other.total))
    amps = np.einsum("xj,jyz->xyz", basis, mat).reshape(da, -1)
    amps /= np.linalg.norm(amps)
    return Ket(reg_a + rest.sub(first) + other, amps.ravel()).permute((reg_a + rest).labels)


# ---------------------------------------------------------------------------
# structure suites
# ---------------------------------------------------------------------------


def absence(rng, n, tol=TOL) -> SuiteResult:
    """Absence of particular information <=> P A^l P = a_l P; all information absent <=> product."""
    out = SuiteResult("absence")
    for i in range(n):
        da, dc = 4, _sizes(rng)
        reg = _reg(a=da, c=dc)
        if i % 2 == 0:
            if i % 4 == 0:
                psi = tensor(random_ket(reg.sub("a"), rng), random_ket(reg.sub("c"), rng))
                dec = random_basis(reg.sub("a"), rng)
            else:
                # entangled, yet the coarse decomposition is invisible on the support of Psi_a
                half = np.eye(4)[:, :2] + np.eye(4)[:, 2:]
                sup = half / np.sqrt(2) @ random_unitary(2, rng)
                coef = complex_normal(rng, (2, dc))
                psi = Ket(reg, (sup @ coef).ravel()).normalized()
                p0 = np.diag([1.0, 1.0, 0.0, 0.0])
                dec = Decomposition.from_projectors(reg.sub("a"), [p0, np.eye(4) - p0])
        else:
            psi = random_ket(reg, rng)
            dec = random_basis(reg.sub("a"), rng)
        v = info_absent(psi, dec, "c", tol)
        support = v.details["support_residual"]
        agree = v.absent == (support <= 1e-7)
        out.record(agree and (v.absent or i % 2 == 1), max(v.residual, support) if i % 2 == 0 else 0.0,
                   f"particular absence, instance {i}")
        # all information absent: product densities against random ones
        rho = (
            tensor(random_density(reg.sub("a"), rng), random_density(reg.sub("c"), rng))
            if i % 2 == 0 else random_density(reg, rng)
        )
        all_abs = all_info_absent(rho, "a", "c", tol)
        per_basis = info_absent(rho, random_basis(reg.sub("a"), rng), "c", tol)
        ok = (all_abs.absent == (i % 2 == 0)) and (per_basis.absent or not all_abs.absent)
        out.record(ok, all_abs.residual if i % 2 == 0 else 0.0, f"all absent, instance {i}")
    return out


def presence_commutator(rng, n, tol=TOL) -> SuiteResult:
    """Lambda orthogonality agrees with [A^l, Psi_a] = 0 on pure states."""
    out = SuiteResult("presence_commutator")
    for i in range(n):
        da = _sizes(rng)
        reg = _reg(a=da, b=da + _sizes(rng, 0, 2))
        dec = random_basis(reg.sub("a"), rng)
        if i % 2 == 0:
            psi = _block_schmidt_ket(dec.basis_vectors(), reg.sub("a"), reg.sub("b"), rng)
        else:
            psi = random_ket(reg, rng)
        v = info_present(psi, dec, "b", tol)
        comm = commutator_residual(psi, dec)
        ok = v.present == (comm <= 1e-7) and (v.present or i % 2 == 1)
        out.record(ok, max(v.residual, comm) if i % 2 == 0 else 0.0,
                   f"instance {i}: verdict {v.verdict}, commutator {comm:.2e}")
    return out


def maximal_entanglement(rng, n, tol=TOL) -> SuiteResult:
    """All information about a in b <=> Psi_a = I/d_a, cross-checked on random bases."""
    out = SuiteResult("maximal_entanglement")
    for i in range(n):
        da = _sizes(rng)
        ra, rb = _reg(a=da), _reg(b=da + _sizes(rng, 0, 2))
        psi = maximally_entangled(ra, rb, rng) if i % 2 == 0 else random_ket(ra + rb, rng)
        v = all_info_present(psi, "a", "b", tol=tol)
        mixed = np.linalg.norm(partial_trace(psi, "a").matrix - np.eye(da) / da)
        probe = info_present(psi, random_basis(ra, rng), "b", tol)
        ok = v.present == (mixed <= tol) and (probe.present or not v.present) and (v.present or i % 2 == 1)
        out.record(ok, v.residual if i % 2 == 0 else 0.0, f"instance {i}")
    return out


def incompatible_pair(rng, n, tol=TOL) -> SuiteResult:
    """Two strongly incompatible decompositions both present => Psi_a = I/d_a and all present."""
    out = SuiteResult("incompatible_pair")
    for i in range(n):
        da = _sizes(rng)
        ra, rb = _reg(a=da), _reg(b=da + _sizes(rng, 0, 1))
        first, second = rotated_fourier_basis(ra, random_unitary(da, rng))
        if not strongly_incompatible(first, second, tol):
            out.record(False, 0.0, "mutually unbiased pair not strongly incompatible")
            continue
        psi = maximally_entangled(ra, rb, rng) if i % 2 == 0 else random_ket(ra + rb, rng)
        both = info_present(psi, first, "b", tol).present and info_present(psi, second, "b", tol).present
        mixed = float(np.linalg.norm(partial_trace(psi, "a").matrix - np.eye(da) / da))
        full = all_info_present(psi, "a", "b", [first, second], tol)
        ok = (not both or (mixed <= tol and full.present)) and (both or i % 2 == 1)
        out.record(ok, mixed if both else 0.0, f"instance {i}")
    return out


def _hidden_product(rng, da, dc, dd, de, db_extra, max_entangled=False) -> tuple[Ket, np.ndarray]:
    """|chi>_{ad} (x) |psi>_{ce} with d (x) e embedded isometrically into b."""
    ra, rd, rc, re = _reg(a=da), _reg(d=dd), _reg(c=dc), _reg(e=de)
    chi = maximally_entangled(ra, rd, rng, embed=False) if max_entangled else random_ket(ra + rd, rng)
    psi = random_ket(rc + re, rng)
    db = dd * de + db_extra
    w = random_isometry(db, dd * de, rng)
    t = np.einsum("xd,ze,bde->xbz", chi.as_matrix("a"), psi.as_matrix("c"), w.reshape(db, dd, de))
    return Ket(_reg(a=da, b=db, c=dc), t.ravel()), w


def hidden_product(rng, n, tol=TOL) -> SuiteResult:
    """Psi_ac = Psi_a (x) Psi_c => the constructive hidden-product factorization succeeds."""
    out = SuiteResult("hidden_product")
    for i in range(n):
        if i % 2 == 0:
            psi, _ = _hidden_product(rng, _sizes(rng), _sizes(rng), _sizes(rng), _sizes(rng), int(rng.integers(0, 3)))
        else:
            psi = random_ket(_reg(a=2, b=_sizes(rng, 2, 4), c=2), rng)
        f = hidden_product_factorize(psi, "a", "c", tol)
        product = all_info_absent(psi, "a", "c", tol).absent
        ok = f.ok == product and (f.ok or i % 2 == 1) and (not f.ok or f.residual <= 1e-9)
        out.record(ok, f.residual if f.ok else 0.0, f"instance {i}: residual {f.residual:.2e}")
    return out


def block_diagonal(rng, n, tol=TOL) -> SuiteResult:
    """Basis information present in b <=> Psi_ac block diagonal in that basis."""
    out = SuiteResult("block_diagonal")
    for i in range(n):
        da = _sizes(rng)
        reg = _reg(a=da, b=da + _sizes(rng, 0, 2), c=_sizes(rng))
        dec = random_basis(reg.sub("a"), rng)
        basis = dec.basis_vectors()
        if i % 2 == 0:
            psi = _block_schmidt_ket(basis, reg.sub("a"), reg.without("a"), rng)
        else:
            psi = random_ket(reg, rng)
        present = info_present(psi, dec, "b", tol).present
        rho = partial_trace(psi, ["a", "c"]).matrix.reshape(da, -1, da, reg.dim("c"))
        rot = np.einsum("xj,xcyd,yk->jckd", basis.conj(), rho, basis)
        off = max(
            (float(np.linalg.norm(rot[j, :, k, :])) for j in range(da) for k in range(da) if j != k),
            default=0.0,
        )
        ok = present == (off <= 1e-7) and (present or i % 2 == 1)
        out.record(ok, off if present else 0.0, f"instance {i}")
    return out


def unbiased_absence(rng, n, tol=TOL) -> SuiteResult:
    """Basis info in b for mixed rho_abc => mutually unbiased info absent from c, Tr(rho [a-bar^k]) = 1/d_a."""
    out = SuiteResult("unbiased_absence")
    for i in range(n):
        da = _sizes(rng)
        reg = _reg(a=da, b=da + _sizes(rng, 0, 1), c=2, x=2)
        first, second = rotated_fourier_basis(reg.sub("a"), random_unitary(da, rng))
        if i % 2 == 0:
            pure = _block_schmidt_ket(first.basis_vectors(), reg.sub("a"), reg.without("a"), rng)
        else:
            pure = random_ket(reg, rng)
        rho = partial_trace(pure, ["a", "b", "c"])
        present = info_present(rho, first, "b", tol).present
        if not present:
            out.record(i % 2 == 1, 0.0, f"instance {i}: constructed state lost its structure")
            continue
        absent = info_absent(rho, second, "c", tol)
        rho_a = partial_trace(rho, "a").matrix
        probs = np.einsum("kxy,yx->k", second.stack(), rho_a).real
        dev = float(np.abs(probs - 1.0 / da).max())
        out.record(absent.absent and dev <= tol, max(absent.residual, dev), f"instance {i}")
    return out


def complete_presence(rng, n, tol=TOL) -> SuiteResult:
    """All information in b => rho_ac product; all in bc and none in c => all in b."""
    out = SuiteResult("complete_presence")
    for i in range(n):
        da = _sizes(rng)
        if i % 2 == 0:
            psi, _ = _hidden_product(rng, da, _sizes(rng), da, _sizes(rng), int(rng.integers(0, 2)), True)
        else:
            psi = random_ket(_reg(a=da, b=_sizes(rng, da, da + 2), c=_sizes(rng)), rng)
        pp = PreProbability.pure(psi)
        in_b = all_info_present(pp, "a", "b", tol=tol)
        prod = all_info_absent(pp, "a", "c", tol)
        ok_i = not in_b.present or prod.absent
        in_bc = all_info_present(pp, "a", ["b", "c"], tol=tol)
        ok_ii = not (in_bc.present and prod.absent) or in_b.present
        constructed_ok = in_b.present if i % 2 == 0 else True
        out.record(ok_i and ok_ii and constructed_ok, prod.residual if in_b.present else 0.0, f"instance {i}")
    return out


def fourkets(rng, n, tol=1e-12) -> SuiteResult:
    """Four-kets identity, its diagonal special case, and the component-sum form."""
    out = SuiteResult("fourkets")
    for i in range(n):
        reg = _reg(a=_sizes(rng, 1, 4), b=_sizes(rng, 1, 4))
        e, f, g, h = (random_ket(reg, rng) for _ in range(4))
        if i % 2 == 1:
            f, h = e, g
        lhs, rhs, third = four_kets_sides(e, f, g, h, "a")
        r = max(abs(lhs - rhs), abs(lhs - third))
        out.record(r <= tol, r, f"instance {i}: residual {r:.2e}")
    return out


# ---------------------------------------------------------------------------
# channel suites
# ---------------------------------------------------------------------------


def random_bundle(rng, da=None, db=None, df=None) -> ChannelBundle:
    da = da or _sizes(rng)
    db = db or _sizes(rng)
    df = df or int(rng.integers(-(-da // db), da * db + 1))
    v = LinearMap(_reg(a=da), _reg(b=db, f=df), random_isometry(db * df, da, rng))
    return ChannelBundle.from_isometry(v, "f")


def isometry_law(rng, n, tol=TOL) -> SuiteResult:
    """R_a = I/d_a, Kraus completeness, canonical orthogonality, Kraus rank = rank R."""
    out = SuiteResult("isometry_law")
    for i in range(n):
        res = random_bundle(rng).invariant_residuals()
        worst = max(res.values())
        out.record(worst <= tol, worst, f"instance {i}: {res}")
    return out


def route_agreement(rng, n, tol=TOL) -> SuiteResult:
    out = SuiteResult("route_agreement")
    for i in range(n):
        b = random_bundle(rng)
        rho = random_density(b.isometry.domain, rng) if i % 2 == 0 else Operator(
            b.isometry.domain, complex_normal(rng, (b.d_a, b.d_a)))
        outs = [apply_channel(b, rho, r).matrix for r in ("isometry", "kraus", "transition")]
        dev = max(float(np.abs(outs[0] - outs[1]).max()), float(np.abs(outs[0] - outs[2]).max()))
        out.record(dev <= tol, dev, f"instance {i}: {dev:.2e}")
    return out


def mixed_environment(rng, n, tol=TOL) -> SuiteResult:
    out = SuiteResult("mixed_environment")
    for i in range(n):
        dv, de, dd = 2, _sizes(rng), _sizes(rng)
        db = (1, 2)[i % 2] if dv * de % 2 == 0 else 1
        dc = dv * de // db
        t = LinearMap(_reg(v=dv, e=de), _reg(b=db, c=dc), random_unitary(dv * de, rng))
        chi = random_ket(_reg(e=de, d=dd), rng)
        psi = mixed_env_channel(t, chi)
        prod = all_info_absent(psi, "a", "d", tol)
        mixed = float(np.linalg.norm(partial_trace(psi, "a").matrix - np.eye(dv) / dv))
        out.record(prod.absent and mixed <= tol, max(prod.residual, mixed), f"instance {i}")
    return out


def random_cq_operator(rng, da=None, db=None) -> tuple[Operator, np.ndarray, list[np.ndarray]]:
    da = da or _sizes(rng)
    db = db or _sizes(rng)
    u = random_unitary(da, rng)
    bs = [random_density(_reg(b=db), rng).matrix for _ in range(da)]
    r = sum(np.kron(np.outer(u[:, j], u[:, j].conj()), bs[j]) for j in range(da)) / da
    return Operator(_reg(a=da, b=db), r), u, bs


def cq_detection(rng, n, tol=TOL) -> SuiteResult:
    out = SuiteResult("cq_detection")
    for i in range(n):
        r, _, _ = random_cq_operator(rng)
        rep = cq_structure(r, "a", tol)
        out.record(rep.is_cq and rep.reassembly_residual <= 1e-9, rep.reassembly_residual, f"instance {i}")
    perfect = cq_structure(standard_channel("bit_flip", 0.0).dynamical, "a", tol)
    out.record(not perfect.is_cq, 0.0, "perfect channel accepted as CQ")
    depol = cq_structure(standard_channel("depolarizing", 0.5).dynamical, "a", tol)
    out.record(depol.is_cq, depol.reassembly_residual, "depolarizing(1/2) rejected")
    return out


STRUCTURE_SUITES: dict[str, Callable] = {
    "absence": absence,
    "presence_commutator": presence_commutator,
    "maximal_entanglement": maximal_entanglement,
    "incompatible_pair": incompatible_pair,
    "hidden_product": hidden_product,
    "block_diagonal": block_diagonal,
    "unbiased_absence": unbiased_absence,
    "complete_presence": complete_presence,
}
CHANNEL_SUITES: dict[str, Callable] = {
    "isometry_law": isometry_law,
    "route_agreement": route_agreement,
    "mixed_environment": mixed_environment,
    "cq_detection": cq_detection,
}
GROUPS = {
    "theorems": STRUCTURE_SUITES,
    "fourkets": {"fourkets": fourkets},
    "channels": CHANNEL_SUITES,
}
DEFAULT_COUNTS = {"theorems": 200, "fourkets": 500, "channels": 100}


def run_group(group: str, seed: int = 0, n: int | None = None, tol: float = TOL) -> list[SuiteResult]:
    """Run every suite of a group; each suite gets its own generator spawned from ``seed``."""
    if group not in GROUPS:
        raise KeyError(f"unknown suite {group!r}; choose from {sorted(GROUPS)}")
    suites = GROUPS[group]
    count = n if n is not None else DEFAULT_COUNTS[group]
    seeds = np.random.SeedSequence(seed).spawn(len(suites))
    results = []
    for (name, fn), ss in zip(suites.items(), seeds):
        rng = np.random.default_rng(ss)
        results.append(fn(rng, count) if group == "fourkets" else fn(rng, count, tol))
    return results
