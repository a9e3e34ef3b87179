import itertools
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stabforge.operators import (
    CornerEmbedding,
    UnitaryAssignment,
    haar_unitary,
    is_pvm,
    random_hermitian,
    random_partial_isometry,
    random_pvm,
    tracial_norm_sq,
)
from stabforge.presentations import evaluate_word, presentation_from_parity_check, std_z2k
from stabforge.stability import (
    SIGN_ROUND_CONSTANT,
    InfiniteSpectralGapError,
    amplification_check,
    best_alignment,
    character_block_farness,
    closeness,
    defect,
    graph_rep,
    inverse_spectral_gap,
    observables_from_pvm,
    pull_back_povm,
    pvm_from_commuting_involutions,
    sign_round,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
SYM3 = [(1, 0, 2), (1, 2, 0)]


def expm_herm(H, theta):
    lam, V = np.linalg.eigh(H)
    return (V * np.exp(1j * theta * lam)) @ V.conj().T


def leg(op, i, k):
    mats = [np.eye(2)] * k
    mats[i] = op
    out = np.eye(1)
    for m in mats:
        out = np.kron(out, m)
    return out


# defect


def test_exact_representation_has_zero_defect():
    A = UnitaryAssignment(np.array([[[1.0]], [[-1.0]], [[-1.0]]]))
    assert defect(A, std_z2k(3)).epsilon == 0


@pytest.mark.parametrize(
    "k,edges", [(4, [(0, 1), (2, 3)]), (3, [(0, 1)]), (4, [(0, 1), (1, 2), (2, 3), (0, 3)]), (5, [(0, 4), (1, 3), (2, 4)])]
)
def test_graph_defect_exact(k, edges):
    rep = defect(graph_rep(k, edges), std_z2k(k))
    assert abs(rep.epsilon - len(edges) / comb(k, 2)) <= 1e-12
    assert rep.by_tag["involution"] == 0


def test_haar_defect_concentrates_near_two(rng):
    A = UnitaryAssignment(np.array([haar_unitary(8, rng) for _ in range(4)]))
    eps = defect(A, std_z2k(4)).epsilon
    assert abs(eps - 2) < 0.3
    assert 0 <= eps <= 4


def test_sampled_defect_is_seeded(rng):
    A = UnitaryAssignment(np.array([haar_unitary(4, rng) for _ in range(3)]))
    P = std_z2k(3)
    r1 = defect(A, P, "sampled", samples=400, seed=5)
    r2 = defect(A, P, "sampled", samples=400, seed=5)
    assert r1.to_json() == r2.to_json()
    assert abs(r1.epsilon - defect(A, P).epsilon) < 0.5
    with pytest.raises(ValueError):
        defect(A, P, "sampled")


def test_defect_dimension_mismatch():
    with pytest.raises(ValueError):
        defect(UnitaryAssignment(np.array([np.eye(2)])), std_z2k(2))


def test_defect_conjugation_invariant(rng):
    A = UnitaryAssignment(np.array([haar_unitary(5, rng) for _ in range(4)]))
    V = haar_unitary(5, rng)
    P = std_z2k(4)
    assert abs(defect(A, P).epsilon - defect(A.conjugate(V), P).epsilon) < 1e-9


def test_zero_defect_iff_relations_hold(rng):
    h = np.array([[1, 1, 0], [0, 1, 1]])
    P = presentation_from_parity_check(h, all_commutators=True)
    for bits in itertools.product((0, 1), repeat=3):
        A = UnitaryAssignment(np.array([[[(-1.0) ** b]] for b in bits]))
        holds = all(np.allclose(evaluate_word(r.word, A), 1) for r in P.relations if r.weight > 0)
        assert (defect(A, P).epsilon < 1e-12) == holds


# closeness


def test_closeness_examples(rng):
    A = UnitaryAssignment(np.array([haar_unitary(3, rng) for _ in range(2)]))
    assert closeness(A, A, CornerEmbedding.identity(3)) == (0, 0)
    B = UnitaryAssignment(np.array([np.kron(np.eye(2), A[i]) for i in range(2)]))
    rep = closeness(A, B, CornerEmbedding.inclusion(3, 6))
    assert rep.dist == pytest.approx(0, abs=1e-15)
    assert rep.trace == pytest.approx(0.5)
    with pytest.raises(ValueError):
        closeness(A, B, CornerEmbedding.identity(3))


@pytest.mark.parametrize("theta", [0.01, 0.1])
def test_closeness_of_small_rotation(theta, rng):
    A = UnitaryAssignment(np.array([haar_unitary(4, rng) for _ in range(3)]))
    B = UnitaryAssignment(np.array([expm_herm(random_hermitian(4, rng), theta) @ A[i] for i in range(3)]))
    assert closeness(A, B, CornerEmbedding.identity(4)).dist <= theta**2 * (1 + theta**2)


def test_best_alignment_recovers_conjugation(rng):
    A = UnitaryAssignment(np.array([leg(X, 0, 2), leg(Z, 1, 2), leg(Z, 0, 2)]))
    V = haar_unitary(4, rng)
    B = A.conjugate(V)
    start = V + 0.05 * haar_unitary(4, rng)
    U, _, Vh = np.linalg.svd(start)
    before = closeness(A, B, CornerEmbedding(U @ Vh)).delta
    after = closeness(A, B, best_alignment(A, B, w0=start, iterations=200)).delta
    # a local heuristic: it must improve on its polar starting point
    assert after < before / 2


# sign rounding


def test_sign_round_examples():
    assert np.allclose(sign_round(Z), Z)
    th = 0.3
    U = np.diag([np.exp(1j * th), np.exp(-1j * th)])
    assert np.allclose(sign_round(U), np.eye(2))
    lhs = tracial_norm_sq(np.eye(2) - U)
    assert lhs == pytest.approx(2 * (1 - np.cos(th)))
    assert lhs <= SIGN_ROUND_CONSTANT * tracial_norm_sq(U @ U - np.eye(2))


def test_sign_round_tie_resolves_to_plus():
    V, ties = sign_round(np.diag([1j, -1.0]), return_ties=True)
    assert ties == 1
    assert np.allclose(V, np.diag([1.0, -1.0]))


def test_sign_round_bound_on_random_unitaries(rng):
    for _ in range(1000):
        d = int(rng.integers(1, 7))
        U = haar_unitary(d, rng)
        V = sign_round(U)
        assert np.allclose(V, V.conj().T, atol=1e-12)
        assert np.allclose(V @ V, np.eye(d), atol=1e-10)
        assert tracial_norm_sq(V - U) <= SIGN_ROUND_CONSTANT * tracial_norm_sq(U @ U - np.eye(d)) + 1e-10


def test_sign_round_constant():
    assert SIGN_ROUND_CONSTANT == pytest.approx((1 + 1 / np.sqrt(2)) ** 2)


# pull-back


def test_pull_back_identity(rng):
    T = random_pvm(4, 3, rng)
    rep = pull_back_povm(T, CornerEmbedding.identity(4))
    assert np.allclose(rep.povm, T)
    assert rep.purity == pytest.approx(1)


def test_pull_back_inclusion(rng):
    T = random_pvm(4, 2, rng)
    rep = pull_back_povm(T, CornerEmbedding.inclusion(2, 4))
    w = CornerEmbedding.inclusion(2, 4)
    assert np.allclose(rep.povm, [w.pull(Ta) for Ta in T])
    assert rep.epsilon == pytest.approx(0.5)
    assert rep.holds and rep.purity >= 1 - 1.5


def test_pull_back_contraction(rng):
    T = random_pvm(8, 4, rng)
    w = CornerEmbedding(np.sqrt(0.9) * haar_unitary(8, rng))
    rep = pull_back_povm(T, w)
    assert rep.epsilon == pytest.approx(0.1)
    assert rep.purity >= 0.7
    Q = rep.povm
    assert np.allclose(Q.sum(axis=0), np.eye(8))
    assert all(np.linalg.eigvalsh(Qa).min() > -1e-12 for Qa in Q)


def test_pull_back_purity_random(rng):
    for _ in range(200):
        dp = int(rng.integers(1, 7))
        d = int(rng.integers(1, 7))
        w = random_partial_isometry(dp, d, int(rng.integers(1, min(d, dp) + 1)), rng)
        assert pull_back_povm(random_pvm(dp, 3, rng), w).holds


def test_pull_back_rejects_povm():
    with pytest.raises(ValueError):
        pull_back_povm(np.array([np.eye(2) / 2, np.eye(2) / 2]), CornerEmbedding.identity(2))


# Fourier correspondence


def test_fourier_single_qubit():
    P = pvm_from_commuting_involutions([Z])
    assert np.allclose(P, [np.diag([1, 0]), np.diag([0, 1])])


def test_fourier_two_legs():
    P = pvm_from_commuting_involutions([leg(Z, 0, 2), leg(Z, 1, 2)])
    assert np.allclose(P.sum(axis=0), np.eye(4))
    for u in range(4):
        assert np.allclose(P[u], np.diag(np.diag(P[u])))
        assert np.trace(P[u]).real == pytest.approx(1)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_fourier_roundtrip_on_z_families(k):
    gens = [leg(Z, i, k) for i in range(k)]
    P = pvm_from_commuting_involutions(gens)
    assert is_pvm(P) is None
    U = observables_from_pvm(P)
    for i in range(k):
        assert np.abs(U[1 << i] - gens[i]).max() <= 1e-9


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_fourier_roundtrip_on_edgeless_graphs(k):
    A = graph_rep(k, [])
    P = pvm_from_commuting_involutions(list(A.matrices))
    assert is_pvm(P) is None
    U = observables_from_pvm(P)
    for x in range(1 << k):
        expect = np.eye(A.dim)
        for i in range(k):
            if (x >> i) & 1:
                expect = expect @ A[i]
        assert np.abs(U[x] - expect).max() <= 1e-9


def test_fourier_rejects_noncommuting():
    with pytest.raises(ValueError):
        pvm_from_commuting_involutions([X, Z])


# graph construction


def test_graph_rep_commutators():
    A = graph_rep(2, [])
    assert tracial_norm_sq(A[0] @ A[1] - A[1] @ A[0]) == 0
    B = graph_rep(2, [(0, 1)])
    assert tracial_norm_sq(B[0] @ B[1] - B[1] @ B[0]) == 2


def test_graph_rep_matching_norms():
    edges = {(0, 1), (2, 3)}
    A = graph_rep(4, sorted(edges))
    assert A.dim == 64
    for i, j in itertools.combinations(range(4), 2):
        n = tracial_norm_sq(A[i] @ A[j] - A[j] @ A[i])
        assert abs(n - (2.0 if (i, j) in edges else 0.0)) <= 1e-12
    for i in range(4):
        assert np.array_equal(A[i] @ A[i], np.eye(64))


def test_graph_rep_errors():
    with pytest.raises(ValueError):
        graph_rep(3, [(0, 0)])
    with pytest.raises(ValueError):
        graph_rep(2, [(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        graph_rep(6, [(a, b) for a, b in itertools.combinations(range(6), 2)][:8])


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.data())
def test_graph_defect_identity(k, data):
    pairs = list(itertools.combinations(range(k), 2))
    mask = data.draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = [p for p, keep in zip(pairs, mask) if keep][:4]
    eps = defect(graph_rep(k, edges), std_z2k(k)).epsilon
    assert abs(eps - len(edges) / comb(k, 2)) <= 1e-12


# spectral gap


@pytest.mark.parametrize("k", range(1, 11))
def test_kappa_exact(k):
    K = 1 << k
    assert inverse_spectral_gap([Fraction(1, K)] * K) == 1
    basis = [Fraction(0)] * K
    for i in range(k):
        basis[1 << i] = Fraction(1, k)
    assert inverse_spectral_gap(basis) == Fraction(k, 2)
    floats = [0.0] * K
    for i in range(k):
        floats[1 << i] = 1 / k
    assert inverse_spectral_gap(floats) == pytest.approx(k / 2)


def test_kappa_infinite():
    with pytest.raises(InfiniteSpectralGapError):
        inverse_spectral_gap([Fraction(1), 0, 0, 0])
    with pytest.raises(InfiniteSpectralGapError):
        inverse_spectral_gap([1.0, 0.0])
    with pytest.raises(ValueError):
        inverse_spectral_gap([0.5, 0.5, 0.0])


# amplification


def test_amplification_single_edge():
    P = std_z2k(3)
    rep = amplification_check(graph_rep(3, [(0, 1)]), SYM3, P)
    assert rep.group_order == 6
    assert sorted(rep.orbit_weights) == pytest.approx([0.5, 0.5])
    assert rep.uniform_on_orbits
    assert rep.epsilon == pytest.approx(1 / 3, abs=1e-12)
    assert rep.bound == pytest.approx(2 / 3, abs=1e-12)
    assert rep.worst == pytest.approx(2 / 3, abs=1e-12)
    assert rep.holds


def test_amplification_random_assignment(rng):
    P = std_z2k(3)
    A = UnitaryAssignment(np.array([haar_unitary(2, rng) for _ in range(3)]))
    assert amplification_check(A, SYM3, P).holds


# partial farness check


def test_character_block_farness():
    assert character_block_farness(graph_rep(3, [])) == pytest.approx(2.0)
    diag = UnitaryAssignment(np.array([np.diag([1.0, -1.0]), np.diag([-1.0, -1.0])]))
    assert character_block_farness(diag) == 0
