import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chanket.hilbert import (
    Decomposition,
    Ket,
    Operator,
    SpaceRegistry,
    dyad,
    embed,
    from_json,
    inner_product,
    is_mutually_unbiased,
    partial_trace,
    partial_transpose,
    purify,
    schmidt_decompose,
    support_and_rank,
    tensor,
    von_neumann_entropy,
)
from chanket.sampling import random_density, random_isometry, random_ket

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
QUBIT_A = SpaceRegistry((("a", 2),))
QUBIT_B = SpaceRegistry((("b", 2),))
BELL = Ket(QUBIT_A + QUBIT_B, np.array([1, 0, 0, 1]) / np.sqrt(2))


# --- registry -------------------------------------------------------------


def test_registry_basics():
    reg = SpaceRegistry.from_dims(["a", "b", "c"], [2, 3, 4])
    assert reg.total == 24 and reg.dim(["a", "c"]) == 8
    assert reg.sub(["c", "a"]).labels == ("a", "c")
    assert reg.without("b").labels == ("a", "c")
    assert SpaceRegistry.from_json(json.loads(json.dumps(reg.to_json()))) == reg


@pytest.mark.parametrize("labels,dims", [(["a", "a"], [2, 2]), (["a"], [0])])
def test_registry_rejects_bad_input(labels, dims):
    with pytest.raises(ValueError):
        SpaceRegistry.from_dims(labels, dims)


def test_registry_unknown_label():
    with pytest.raises(KeyError):
        QUBIT_A.index("z")


# --- tensor, dyad ---------------------------------------------------------


def test_tensor_of_basis_kets():
    k = tensor(Ket.basis(QUBIT_A, 0), Ket.basis(QUBIT_B, 1))
    assert np.array_equal(k.amplitudes, [0, 1, 0, 0])


def test_tensor_identities_and_kron():
    eye = tensor(Operator.identity(QUBIT_A), Operator.identity(QUBIT_B))
    assert np.array_equal(eye.matrix, np.eye(4))
    xz = tensor(Operator(QUBIT_A, X), Operator(QUBIT_B, Z)).matrix
    expected = np.array([[0, 0, 1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, -1, 0, 0]])
    assert np.array_equal(xz, expected)


def test_tensor_label_collision():
    with pytest.raises(ValueError):
        tensor(Ket.basis(QUBIT_A, 0), Ket.basis(QUBIT_A, 0))


def test_dyad_examples():
    assert np.array_equal(dyad(Ket.basis(QUBIT_A, 0)).matrix, np.diag([1, 0]))
    plus = Ket(QUBIT_A, np.array([1, 1]) / np.sqrt(2))
    assert np.allclose(dyad(plus).matrix, np.full((2, 2), 0.5))


def test_inner_product_is_hilbert_schmidt():
    a, b = Operator(QUBIT_A, X), Operator(QUBIT_A, Z @ X)
    assert np.isclose(inner_product(a, b), np.trace(X.conj().T @ Z @ X))


# --- partial trace / transpose -------------------------------------------


def test_partial_trace_bell(backend):
    assert np.allclose(partial_trace(BELL, "a").matrix, np.eye(2) / 2)
    assert np.allclose(partial_trace(dyad(BELL), "b").matrix, np.eye(2) / 2)


def test_partial_trace_isometry_ket(backend, rng):
    from chanket.channel import LinearMap, channel_ket

    v = LinearMap(SpaceRegistry((("a", 3),)), SpaceRegistry((("b", 2), ("f", 3))), random_isometry(6, 3, rng))
    assert np.allclose(partial_trace(channel_ket(v), "a").matrix, np.eye(3) / 3, atol=1e-9)


def test_partial_trace_keep_nothing_is_trace(backend, rng):
    reg = SpaceRegistry.from_dims(["a", "b"], [2, 3])
    rho = random_density(reg, rng)
    once = partial_trace(partial_trace(rho, "a"), [])
    assert once.matrix.shape == (1, 1) and np.isclose(once.matrix[0, 0], 1.0)


def test_partial_trace_composition(backend, rng):
    reg = SpaceRegistry.from_dims(["a", "b", "c"], [2, 3, 2])
    rho = random_density(reg, rng)
    two_steps = partial_trace(partial_trace(rho, ["a", "b"]), "a")
    assert np.allclose(two_steps.matrix, partial_trace(rho, "a").matrix, atol=1e-12)


def test_partial_trace_unknown_label():
    with pytest.raises(KeyError):
        partial_trace(BELL, "q")


def test_partial_transpose_bell_spectrum(backend):
    w = np.linalg.eigvalsh(partial_transpose(dyad(BELL), "a").matrix)
    assert np.isclose(w[0], -0.5) and np.sum(np.isclose(w, -0.5)) == 1


def test_partial_transpose_diagonal_fixed(backend):
    op = Operator(QUBIT_A + QUBIT_B, np.diag([1, 2, 3, 4]))
    assert np.array_equal(partial_transpose(op, "b").matrix, op.matrix)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31), which=st.sampled_from(["a", "b", "c"]))
def test_partial_transpose_involution(seed, which):
    rng = np.random.default_rng(seed)
    reg = SpaceRegistry.from_dims(["a", "b", "c"], [2, 3, 2])
    m = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    h = Operator(reg, m + m.conj().T)
    once = partial_transpose(h, which)
    assert once.is_hermitian() and np.isclose(once.trace(), h.trace())
    assert np.allclose(partial_transpose(once, which).matrix, h.matrix, atol=0)


def test_embed_places_operator_on_subsystem():
    reg = SpaceRegistry.from_dims(["a", "b"], [2, 3])
    assert np.allclose(embed(X, reg.sub("a"), reg), np.kron(X, np.eye(3)))
    assert np.allclose(embed(np.diag([1, 2, 3]), reg.sub("b"), reg), np.kron(np.eye(2), np.diag([1, 2, 3])))


# --- Schmidt, support, purification, entropy -----------------------------


def test_schmidt_bell():
    form = schmidt_decompose(BELL, "a")
    assert np.allclose(form.coefficients, [2**-0.5] * 2) and form.schmidt_rank == 2


def test_schmidt_product():
    k = tensor(Ket(QUBIT_A, [0.6, 0.8]), Ket(QUBIT_B, [1j, 0]))
    form = schmidt_decompose(k, "a")
    assert form.schmidt_rank == 1 and np.isclose(form.coefficients[0], 1.0)


def test_schmidt_depolarizing_four_terms():
    from chanket.channel import standard_channel

    psi = standard_channel("depolarizing", 0.1).channel_ket
    assert schmidt_decompose(psi, ["a", "b"]).schmidt_rank == 4


@pytest.mark.parametrize("left", [[], ["a", "b"]])
def test_schmidt_rejects_trivial_bipartition(left):
    with pytest.raises(ValueError):
        schmidt_decompose(BELL, left)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**31), dims=st.lists(st.integers(1, 3), min_size=2, max_size=4), data=st.data())
def test_schmidt_reassembly(seed, dims, data):
    rng = np.random.default_rng(seed)
    reg = SpaceRegistry.from_dims([f"s{k}" for k in range(len(dims))], dims)
    ket = random_ket(reg, rng)
    cut = data.draw(st.integers(1, len(dims) - 1))
    left = data.draw(st.permutations(reg.labels))[:cut]
    form = schmidt_decompose(ket, left)
    assert np.isclose(form.probabilities.sum(), 1.0)
    assert np.allclose(form.reassemble().amplitudes, ket.amplitudes, atol=1e-9)
    _, r = support_and_rank(partial_trace(ket, left))
    assert r == form.schmidt_rank


def test_support_examples():
    p, r = support_and_rank(Operator(QUBIT_A, np.eye(2) / 2))
    assert r == 2 and np.allclose(p.matrix, np.eye(2))
    d = dyad(BELL)
    p, r = support_and_rank(d)
    assert r == 1 and np.allclose(p.matrix, d.matrix)
    with pytest.raises(ValueError):
        support_and_rank(Operator(QUBIT_A, Z))


def test_support_bit_flip_rank_two():
    from chanket.channel import standard_channel

    r = standard_channel("bit_flip", 0.3).dynamical
    p, k = support_and_rank(r)
    assert k == 2 and np.allclose(p.matrix @ r.matrix @ p.matrix, r.matrix)


def test_purify_examples(rng):
    mixed = purify(Operator(QUBIT_A, np.eye(2) / 2), env_dim=2)
    assert np.allclose(partial_trace(mixed, "a").matrix, np.eye(2) / 2)
    assert np.allclose(partial_trace(mixed, "e").matrix, np.eye(2) / 2)
    psi = Ket(QUBIT_A, np.array([0.6, 0.8j]))
    pure = purify(dyad(psi))
    assert pure.registry.dims == (2, 1)
    assert np.isclose(abs(np.vdot(pure.amplitudes, psi.amplitudes)), 1.0)
    reg4 = SpaceRegistry((("a", 4),))
    rho = random_density(reg4, rng, rank=3)
    back = partial_trace(purify(rho, env_dim=3), "a")
    assert np.allclose(back.matrix, rho.matrix, atol=1e-9)
    with pytest.raises(ValueError):
        purify(rho, env_dim=2)
    with pytest.raises(ValueError):
        purify(Operator(QUBIT_A, Z))


def test_entropy_values(rng):
    assert von_neumann_entropy(dyad(BELL)) == pytest.approx(0.0, abs=1e-12)
    assert von_neumann_entropy(Operator(SpaceRegistry((("a", 8),)), np.eye(8) / 8)) == pytest.approx(3.0)
    assert von_neumann_entropy(Operator(QUBIT_A, np.diag([0.25, 0.75]))) == pytest.approx(0.8112781244591328, abs=1e-12)
    rho, sigma = random_density(QUBIT_A, rng), random_density(SpaceRegistry((("b", 3),)), rng)
    assert von_neumann_entropy(tensor(rho, sigma)) == pytest.approx(
        von_neumann_entropy(rho) + von_neumann_entropy(sigma), abs=1e-9)
    with pytest.raises(ValueError):
        von_neumann_entropy(Operator(QUBIT_A, np.eye(2)))


# --- decompositions ------------------------------------------------------


def test_decomposition_validation():
    with pytest.raises(ValueError):
        Decomposition.from_projectors(QUBIT_A, [np.diag([1, 0])])
    with pytest.raises(ValueError):
        Decomposition.from_basis(QUBIT_A, np.array([[1, 1], [0, 1]]))
    dec = Decomposition.computational(QUBIT_A)
    assert dec.is_rank1() and len(dec) == 2


def test_mutually_unbiased_examples():
    z = Decomposition.computational(QUBIT_A)
    x = Decomposition.from_basis(QUBIT_A, np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    c, s = np.cos(np.pi / 12), np.sin(np.pi / 12)
    tilted = Decomposition.from_basis(QUBIT_A, np.array([[c, -s], [s, c]]))
    assert is_mutually_unbiased(z, x)
    assert not is_mutually_unbiased(z, z)
    assert not is_mutually_unbiased(z, tilted)
    with pytest.raises(ValueError):
        is_mutually_unbiased(z, Decomposition.computational(QUBIT_B))


# --- flags and JSON ------------------------------------------------------


def test_operator_flags():
    assert Operator(QUBIT_A, X).is_hermitian() and not Operator(QUBIT_A, X).is_positive()
    assert Operator(QUBIT_A, np.diag([1, 0])).is_projector()
    assert not Operator(QUBIT_A, np.array([[0, 1], [0, 0]])).is_hermitian()


def test_json_round_trip(rng):
    k = random_ket(SpaceRegistry.from_dims(["a", "b"], [2, 3]), rng)
    data = json.loads(json.dumps(k.to_json()))
    assert data["kind"] == "ket" and data["registry"] == {"labels": ["a", "b"], "dims": [2, 3]}
    assert np.array_equal(from_json(data).amplitudes, k.amplitudes)
    op = random_density(QUBIT_A + QUBIT_B, rng)
    assert np.array_equal(from_json(json.loads(json.dumps(op.to_json()))).matrix, op.matrix)
