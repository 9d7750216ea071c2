import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chanket.channel import standard_channel
from chanket.hilbert import Operator, SpaceRegistry, partial_trace
from chanket.opbasis import (
    CoefficientTensor,
    hermitian_basis,
    pauli_assemble,
    pauli_expand,
    pauli_string,
    trace_out_in_coefficients,
)
from chanket.sampling import random_density

PAULIS = [
    np.eye(2),
    np.array([[0, 1], [1, 0]]),
    np.array([[0, -1j], [1j, 0]]),
    np.diag([1, -1]),
]


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_basis_gram_and_trace(d):
    b = hermitian_basis(d)
    assert len(b) == d * d
    assert np.allclose(b.gram(), d * np.eye(d * d), atol=1e-12)
    assert np.allclose(b[0], np.eye(d))
    for j in range(1, d * d):
        assert abs(np.trace(b[j])) < 1e-12
        assert np.allclose(b[j], b[j].conj().T)


def test_qubit_basis_is_pauli():
    b = hermitian_basis(2)
    assert b.name == "pauli"
    for j in range(4):
        assert np.allclose(b[j], PAULIS[j]) and b.element_name(j) == "IXYZ"[j]


def test_basis_rejects_trivial_dimension():
    with pytest.raises(ValueError):
        hermitian_basis(1)


def _terms(op, p_tol=1e-12):
    return {k: round(v, 12) for k, v in pauli_expand(op).nonzero_terms(p_tol).items()}


@pytest.mark.parametrize("p", [0.0, 0.1, 0.37, 1.0])
def test_bit_flip_tables(p):
    b = standard_channel("bit_flip", p)
    q = pauli_expand(b.transition)
    assert np.isclose(q.normalization, 0.25)
    expected = {"II": 1.0, "XX": 1.0, "YY": 1 - 2 * p, "ZZ": 1 - 2 * p}
    got = q.nonzero_terms(1e-12)
    assert got.keys() == {k for k, v in expected.items() if abs(v) > 1e-12}
    for k, v in got.items():
        assert v == pytest.approx(expected[k], abs=1e-12)
    r = pauli_expand(b.dynamical).nonzero_terms(1e-12)
    for k, v in r.items():
        assert v == pytest.approx(-expected[k] if k == "YY" else expected[k], abs=1e-12)


@pytest.mark.parametrize("p", [0.0, 0.25, 0.6])
def test_amplitude_damping_table(p):
    got = pauli_expand(standard_channel("amplitude_damping", p).transition).nonzero_terms(1e-12)
    expected = {"II": 1.0, "IZ": p, "XX": np.sqrt(1 - p), "YY": np.sqrt(1 - p), "ZZ": 1 - p}
    expected = {k: v for k, v in expected.items() if abs(v) > 1e-12}
    assert got.keys() == expected.keys()
    for k in got:
        assert got[k] == pytest.approx(expected[k], abs=1e-12)


@pytest.mark.parametrize("p", [0.0, 0.2, 0.5, 2 / 3])
def test_depolarizing_table(p):
    q = pauli_expand(standard_channel("depolarizing", p).transition)
    c = q.real()
    assert c[0, 0] == pytest.approx(1.0)
    for k in (1, 2, 3):
        assert c[k, k] == pytest.approx(1 - 2 * p, abs=1e-12)
    off = c.copy()
    np.fill_diagonal(off, 0)
    assert np.abs(off).max() < 1e-12


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31), dims=st.lists(st.integers(1, 3), min_size=1, max_size=3))
def test_expand_assemble_round_trip(seed, dims):
    rng = np.random.default_rng(seed)
    reg = SpaceRegistry.from_dims([f"s{k}" for k in range(len(dims))], dims)
    n = reg.total
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    for op in (Operator(reg, m), Operator(reg, m + m.conj().T)):
        c = pauli_expand(op)
        assert np.allclose(pauli_assemble(c).matrix, op.matrix, atol=1e-10)
        assert np.isclose(c.coefficients[(0,) * len(dims)], np.trace(op.matrix))
    # Hermitian input gives real coefficients
    assert pauli_expand(Operator(reg, m + m.conj().T)).is_real()


def test_expansion_matches_direct_traces(rng):
    reg = SpaceRegistry.from_dims(["a", "b"], [2, 3])
    rho = random_density(reg, rng)
    c = pauli_expand(rho)
    for j in range(4):
        for k in range(9):
            s = pauli_string([j, k], [2, 3])
            assert np.isclose(c.term(j, k), np.trace(s @ rho.matrix))


@pytest.mark.parametrize("label", ["a", "b", "c"])
def test_trace_out_in_coefficients(label, rng):
    reg = SpaceRegistry.from_dims(["a", "b", "c"], [2, 3, 2])
    rho = random_density(reg, rng)
    via_coeffs = pauli_assemble(trace_out_in_coefficients(pauli_expand(rho), label))
    direct = partial_trace(rho, reg.without(label).labels)
    assert via_coeffs.registry == direct.registry
    assert np.allclose(via_coeffs.matrix, direct.matrix, atol=1e-12)


def test_coefficient_json_round_trip(rng):
    reg = SpaceRegistry.from_dims(["a", "b"], [2, 3])
    for op in (random_density(reg, rng), Operator(reg, rng.normal(size=(6, 6)) * 1j)):
        c = pauli_expand(op)
        back = CoefficientTensor.from_json(json.loads(json.dumps(c.to_json())))
        assert back.registry == c.registry and np.allclose(back.coefficients, c.coefficients)


def test_shape_mismatch_rejected():
    reg = SpaceRegistry.from_dims(["a"], [2])
    with pytest.raises(ValueError):
        pauli_assemble(CoefficientTensor(reg, np.zeros(9), 0.5))
