import itertools

import numpy as np
import pytest

from stabforge.operators import is_pvm, tau
from stabforge.pauli import (
    MAX_QUBITS,
    PauliLabel,
    braiding_relation_check,
    pauli_group_order_check,
    pauli_observable,
    pauli_projector,
    pauli_pvm,
    pauli_small_assignment,
)
from stabforge.presentations import pauli_small
from stabforge.stability import defect, pvm_from_commuting_involutions

SX = np.array([[0, 1], [1, 0]])
SZ = np.diag([1, -1])


def kron_oracle(basis, a, k):
    """Tensor product built leg by leg; bit i of a acts on qubit i (leftmost factor first)."""
    single = SX if basis == "X" else SZ
    out = np.eye(1)
    for i in range(k):
        out = np.kron(out, single if (a >> i) & 1 else np.eye(2))
    return out


def obs(W, a, k):
    return pauli_observable(PauliLabel(W, a, k))


def test_observable_examples():
    assert np.array_equal(obs("X", 0, 3), np.eye(8))
    assert np.array_equal(obs("X", 1, 1), SX)
    lhs = obs("X", 3, 2) @ obs("Z", 3, 2)
    assert np.array_equal(lhs, obs("Z", 3, 2) @ obs("X", 3, 2))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_observable_matches_kron(k):
    for W in "XZ":
        for a in range(1 << k):
            M = obs(W, a, k)
            assert np.array_equal(M, kron_oracle(W, a, k))
            assert set(np.unique(M)) <= {-1.0, 0.0, 1.0}


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_products_close_up(k):
    for W in "XZ":
        for a, b in itertools.product(range(1 << k), repeat=2):
            assert np.array_equal(obs(W, a, k) @ obs(W, b, k), obs(W, a ^ b, k))


def test_apply_matches_dense(rng):
    state = rng.normal(size=(8, 3))
    for W in "XZ":
        for a in range(8):
            label = PauliLabel(W, a, 3)
            assert np.allclose(label.apply(state), pauli_observable(label) @ state)


def test_projector_examples():
    assert np.array_equal(pauli_projector("Z", 0, 1), np.diag([1.0, 0.0]))
    for u in range(4):
        assert tau(pauli_projector("Z", u, 2)).real == pytest.approx(0.25)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_projectors_form_pvm(k):
    for W in "XZ":
        P = pauli_pvm(W, k)
        assert is_pvm(P, 1e-12) is None
        for u in range(1 << k):
            expect = sum((-1) ** bin(u & al).count("1") * obs(W, al, k) for al in range(1 << k)) / (1 << k)
            assert np.allclose(P[u], expect)
            assert tau(P[u]).real == pytest.approx(2.0**-k)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_braiding_relation_exhaustive(k):
    for a, b in itertools.product(range(1 << k), repeat=2):
        assert braiding_relation_check(a, b, k) <= 1e-12
    assert braiding_relation_check(1, 0, 1) == 0
    assert braiding_relation_check(1, 1, 1) == 0


def test_group_order():
    assert pauli_group_order_check(1) == 8
    assert pauli_group_order_check(2) == 32
    assert pauli_group_order_check(3) == 128
    J = obs("X", 1, 1) @ obs("Z", 1, 1) @ obs("X", 1, 1) @ obs("Z", 1, 1)
    assert np.array_equal(J, -np.eye(2))
    with pytest.raises(ValueError):
        pauli_group_order_check(5)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_small_presentation_assignment_is_exact(k):
    assert defect(pauli_small_assignment(k), pauli_small(k)).epsilon == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_fourier_duality(k):
    P = pvm_from_commuting_involutions([obs("Z", 1 << i, k) for i in range(k)])
    assert np.allclose(P, pauli_pvm("Z", k))


def test_label_budget():
    with pytest.raises(ValueError):
        PauliLabel("X", 0, MAX_QUBITS + 1)
    with pytest.raises(ValueError):
        PauliLabel("Y", 0, 1)
    with pytest.raises(ValueError):
        PauliLabel("Z", 4, 2)
