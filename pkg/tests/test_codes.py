import itertools
import json

import numpy as np
import pytest

from chanket.codes import (
    CodeSpec,
    builtin_code,
    code_channel_ket,
    default_max_check,
    error_set,
    knill_laflamme,
    operator_base,
    s_equals_2t_check,
    security,
    singleton_check,
    singleton_is_tight,
)
from chanket.hilbert import Decomposition, Ket, Operator, partial_trace
from chanket.infoloc import entropy_chain, hidden_product_factorize, info_absent
from chanket.opbasis import pauli_string


@pytest.fixture(scope="module")
def five():
    return builtin_code("five_qubit")


@pytest.fixture(scope="module")
def rep3():
    return builtin_code("repetition3")


# --- code specs and channel kets -----------------------------------------


def test_builtin_projector_ranks(five, rep3):
    for code in (five, rep3):
        assert np.linalg.matrix_rank(code.projector().matrix) == 2
        assert code.projector().is_projector()
    with pytest.raises(ValueError):
        builtin_code("steane")


def test_five_qubit_codewords_are_stabilized(five):
    stabs = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]
    for g in stabs:
        s = pauli_string(["IXYZ".index(c) for c in g], [2] * 5)
        assert np.allclose(s @ five.codewords, five.codewords)
    # logical Z = ZZZZZ separates the two codewords
    zl = pauli_string([3] * 5, [2] * 5)
    assert np.allclose(np.diag(five.codewords.conj().T @ zl @ five.codewords), [1, -1])


def test_code_channel_kets(rep3, five):
    psi = code_channel_ket(rep3)
    expected = np.zeros(16)
    expected[0] = expected[15] = 1 / np.sqrt(2)
    assert np.allclose(psi.amplitudes, expected)
    psi5 = code_channel_ket(five)
    assert psi5.registry.total == 64
    assert np.allclose(partial_trace(psi5, "a").matrix, np.eye(2) / 2)
    triv = code_channel_ket(builtin_code("trivial1"))
    assert triv.registry.dims == (1, 2)


def test_codespec_validation_and_json(five):
    with pytest.raises(ValueError):
        CodeSpec((2, 2), np.ones((4, 2)))
    with pytest.raises(ValueError):
        CodeSpec((2, 2), np.ones((8, 1)))
    back = CodeSpec.from_json(json.loads(json.dumps(five.to_json())))
    assert back.carrier_dims == five.carrier_dims and np.allclose(back.codewords, five.codewords)
    with pytest.raises(ValueError):
        CodeSpec.from_json({"n": 3, "carrier_dims": [2, 2], "codewords": five.to_json()["codewords"]})


# --- security -------------------------------------------------------------


def test_five_qubit_security(five):
    rep = security(five)
    assert rep.s == 2 and rep.route1_s == rep.route2_s == 2 and not rep.capped
    assert rep.distance == 3
    w = rep.witness
    assert len(w["carriers"]) == 3 and w["residual"] > 1e-3
    # the witness really violates B F B = b(F) B
    m = w["codeword_matrix"]
    assert np.linalg.norm(m - np.trace(m) / 2 * np.eye(2)) > 1e-3
    assert all(r1 <= 1e-9 and r2 <= 1e-9 for u, (r1, r2) in rep.residuals.items() if len(u) <= 2)


def test_repetition_security_has_z_witness(rep3):
    rep = security(rep3)
    assert rep.s == 0
    w = rep.witness
    assert w["carriers"] == ("1",) and w["operator_name"] == "Z"
    assert np.allclose(w["codeword_matrix"], np.diag([1, -1]))


def test_trivial_code_security_is_n():
    code = CodeSpec((2, 2, 2), np.eye(8)[:, [3]])
    assert default_max_check(code) == 3
    rep = security(code)
    assert rep.s == 3 and rep.capped and rep.witness is None


def test_security_max_check_bounds(rep3):
    with pytest.raises(ValueError):
        security(rep3, max_check=4)
    assert security(builtin_code("five_qubit"), max_check=1).capped


def test_security_parallel_is_deterministic(five):
    serial = json.dumps(security(five).to_json(), sort_keys=True)
    assert json.dumps(security(five, jobs=4).to_json(), sort_keys=True) == serial


def test_security_monotone_under_partial_trace(five, rep3):
    # if a subset is uncorrelated with a, so is every smaller subset
    for code in (five, rep3):
        rep = security(code, max_check=code.n)
        ok = {u for u, (r1, _) in rep.residuals.items() if r1 <= 1e-9}
        for u in ok:
            for k in range(1, len(u)):
                assert all(v in ok for v in itertools.combinations(u, k))


# --- Knill-Laflamme -------------------------------------------------------


def test_kl_examples(rep3, five):
    ops, names = error_set(rep3, "bitflip")
    assert names == ["III", "XII", "IXI", "IIX"]
    assert knill_laflamme(rep3, ops).passes
    z1 = pauli_string([3, 0, 0], [2, 2, 2])
    rep = knill_laflamme(rep3, [np.eye(8), z1])
    assert not rep.passes and rep.residual > 1
    ops, names = error_set(five, "pauli1")
    assert len(ops) == 16
    kl = knill_laflamme(five, ops, names=names)
    assert kl.passes and np.allclose(kl.b_matrix, kl.b_matrix.conj().T)
    json.dumps(kl.to_json())
    with pytest.raises(ValueError):
        knill_laflamme(rep3, [np.eye(4)])
    with pytest.raises(ValueError):
        error_set(rep3, "erasure")


def test_s_equals_2t(five, rep3):
    assert s_equals_2t_check(five, 1)
    assert not s_equals_2t_check(rep3, 1)
    assert s_equals_2t_check(rep3, 0)


# --- bases and bounds -----------------------------------------------------


def test_operator_base_examples():
    x = np.array([[0, 1], [1, 0]])
    z = np.diag([1, -1])
    from chanket.codes import carrier_registry

    reg3, reg5 = carrier_registry([2] * 3), carrier_registry([2] * 5)
    assert operator_base(Operator(reg3, np.kron(np.eye(2), np.kron(x, np.eye(2))))) == ("2",)
    assert operator_base(Operator(reg3, np.eye(8))) == ()
    f = pauli_string([1, 0, 3, 0, 0], [2] * 5)
    assert operator_base(Operator(reg5, f)) == ("1", "3")
    assert operator_base(Operator(reg3, np.kron(z, np.kron(np.eye(2), z)) + np.eye(8))) == ("1", "3")


@pytest.mark.parametrize("args,holds,tight", [((5, 1, 2, 2), True, True), ((4, 1, 2, 2), False, False),
                                              ((1, 0, 2, 2), True, True), ((9, 2, 2, 2), True, True),
                                              ((7, 1, 16, 2), False, False), ((8, 1, 8, 2), True, False)])
def test_singleton(args, holds, tight):
    assert singleton_check(*args) is holds
    assert singleton_is_tight(*args) is tight


def test_singleton_rejects_bad_args():
    with pytest.raises(ValueError):
        singleton_check(5, 1, 0, 2)


# --- where the information goes -------------------------------------------


def test_five_qubit_recovery_location(five):
    psi = code_channel_ket(five)
    for u in itertools.combinations(five.labels, 2):
        f = hidden_product_factorize(psi, "a", list(u))
        assert f.ok, u
        assert np.allclose(partial_trace(f.chi, "a").matrix, np.eye(2) / 2, atol=1e-9)


def test_five_qubit_entropy_chain(five):
    psi = code_channel_ket(five)
    chain = entropy_chain(psi, "a", ["1", "2", "3"], ["4"], ["5"])
    assert chain.ok
    assert chain.entropies["a"] <= chain.entropies["b"] + 1e-9


def test_repetition_x_information_absent_from_entrance(rep3):
    psi = code_channel_ket(rep3)
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    pair = psi.registry.sub(["1", "2"])
    xx = Decomposition.from_basis(pair, np.kron(h, h))
    v = info_absent(psi, xx, "a")
    assert v.absent, v.residual
    # while Z information on the same pair is perfectly correlated with a
    assert not info_absent(psi, Decomposition.computational(pair), "a").absent
