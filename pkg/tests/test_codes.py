import itertools
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from conftest import clmul_mod
from stabforge.codes import (
    LinearCode,
    LocalTester,
    brm_tester,
    build_code_family,
    code_distance,
    compose_with_hadamard,
    evaluate_polynomial,
    field_rank,
    hadamard_code,
    interpolation_coeffs,
    reed_muller_code,
    rm_tester,
    tester_soundness as soundness,
)
from stabforge.fields import find_self_dual_basis

F4 = find_self_dual_basis(2)


def rm_pair(m=1, d=1, spec=F4):
    code = reed_muller_code(spec, m, d)
    return code, rm_tester(code, m, d)


def oracle_soundness(tester: LocalTester, mul) -> Fraction:
    """Brute force over all words, written without the library's batched search."""
    code = tester.code
    q, n = code.q, code.n
    words = [tuple(int(x) for x in w) for w in code.codewords()]
    best = None
    for x in itertools.product(range(q), repeat=n):
        dist = min(sum(a != b for a, b in zip(x, c)) for c in words)
        if dist == 0:
            continue
        reject = Fraction(0)
        for row, w in zip(tester.rows, tester.weights):
            s = 0
            for col, coeff in row:
                s ^= mul(coeff, x[col])
            if s:
                reject += w
        ratio = reject / Fraction(dist, n)
        best = ratio if best is None else min(best, ratio)
    return best


def annihilates(tester: LocalTester) -> bool:
    code = tester.code
    H = tester.dense()
    for w in code.codewords():
        prods = code.field.mul_array(H, np.broadcast_to(w, H.shape))
        if np.any(np.bitwise_xor.reduce(prods, axis=1)):
            return False
    return True


@pytest.mark.parametrize("t", [1, 2, 3])
def test_hadamard_parameters(t):
    code, tester = hadamard_code(t)
    assert (code.n, code.k, code_distance(code)) == (2**t, t, 2 ** (t - 1))
    assert len(tester) == 4**t
    assert tester.locality <= 3
    assert annihilates(tester)
    assert field_rank(code.field, tester.dense()) == code.n - code.k


def test_hadamard_degenerate_rows_kept():
    _, tester = hadamard_code(2)
    # x = y and x = 0 both cancel to the single check g(0) = 0
    assert tester.rows[tester.labels.index((1, 1))] == ((0, 1),)
    assert tester.rows[tester.labels.index((0, 3))] == ((0, 1),)
    assert tester.rows[tester.labels.index((1, 2))] == ((1, 1), (2, 1), (3, 1))


def test_rm_parameters():
    code, tester = rm_pair(1, 1)
    assert (code.n, code.k, code_distance(code)) == (4, 2, 3)
    assert annihilates(tester)
    assert field_rank(F4, tester.dense()) == code.n - code.k
    assert tester.locality <= 3
    code2 = reed_muller_code(F4, 2, 1)
    assert (code2.n, code2.k) == (16, 4)
    code0 = reed_muller_code(F4, 0, 1)
    assert (code0.n, code0.k) == (1, 1)
    with pytest.raises(ValueError):
        reed_muller_code(F4, 1, 4)


def test_rm_m2_tester_kernel():
    code, tester = rm_pair(2, 1)
    assert annihilates(tester)
    assert field_rank(F4, tester.dense()) == code.n - code.k
    code.check_invariants()


def test_interpolation_at_node_and_constant():
    nodes = [0, 1]
    for u in range(4):
        for j, tj in enumerate(nodes):
            assert interpolation_coeffs(F4, u, u ^ tj, nodes) == [int(i == j) for i in range(2)]
        assert interpolation_coeffs(F4, u, 3, [0]) == [1]
    with pytest.raises(ValueError):
        interpolation_coeffs(F4, 0, 1, [2, 2])


def test_interpolation_reconstructs_linear_polynomials(rng):
    mul = lambda a, b: clmul_mod(a, b, F4.poly, 2)
    nodes = [0, 1]
    for _ in range(50):
        u, v, c0, c1 = (int(x) for x in rng.integers(0, 4, size=4))
        f = lambda x: c0 ^ mul(c1, x)
        alpha = interpolation_coeffs(F4, u, v, nodes)
        acc = 0
        for a, t in zip(alpha, nodes):
            acc ^= mul(a, f(u ^ t))
        assert acc == f(v)


def test_schwartz_zippel_q4_m2(rng):
    pts = list(itertools.product(range(4), repeat=2))
    monomials = [(0, 0), (1, 0), (0, 1)]
    for _ in range(100):
        while True:
            f = {a: int(c) for a, c in zip(monomials, rng.integers(0, 4, 3))}
            g = {a: int(c) for a, c in zip(monomials, rng.integers(0, 4, 3))}
            if f != g:
                break
        agree = sum(evaluate_polynomial(F4, f, p) == evaluate_polynomial(F4, g, p) for p in pts)
        assert Fraction(agree, 16) <= Fraction(1, 4)


def test_composition_parameters():
    rm, tester = rm_pair()
    code, ctester = compose_with_hadamard(rm, tester)
    assert (code.n, code.k) == (16, 4)
    assert field_rank(code.field, ctester.dense()) == 16 - 4
    assert annihilates(ctester)
    assert code_distance(code) >= 6
    assert ctester.locality <= 3
    assert sum(ctester.weights) == 1
    assert not np.any(code.encode(np.zeros(4, dtype=int)))


def test_composed_blocks_are_hadamard_words():
    rm, tester = rm_pair()
    code, _ = compose_with_hadamard(rm, tester)
    had, _ = hadamard_code(2)
    for w in code.codewords():
        for block in w.reshape(4, 4):
            assert had.contains(block)


def test_brm_matches_composition():
    code, tester = brm_tester(2, 1, 1)
    assert (code.n, code.k, len(tester)) == (16, 4, 4**3 * 2)
    assert annihilates(tester)
    rm, rtester = rm_pair()
    _, ctester = compose_with_hadamard(rm, rtester)
    assert Counter(tester.rows) == Counter(ctester.rows)
    assert sum(tester.weights) == 1


def test_hadamard_soundness_exhaustive():
    _, tester = hadamard_code(2)
    rep = soundness(tester, method="exhaustive")
    assert rep.method == "exhaustive"
    assert rep.rho > 0
    assert rep.rho == oracle_soundness(tester, lambda a, b: a & b)


def test_rm_soundness_exhaustive():
    _, tester = rm_pair()
    rep = soundness(tester, method="exhaustive")
    assert isinstance(rep.rho, Fraction)
    assert rep.rho >= Fraction(1, 6)
    assert rep.rho == oracle_soundness(tester, lambda a, b: clmul_mod(a, b, F4.poly, 2))


def test_soundness_budget_and_sampling():
    _, tester = brm_tester(2, 1, 1)
    with pytest.raises(ValueError):
        soundness(tester, budget=100, method="exhaustive")
    rep = soundness(tester, budget=100, samples=300, seed=3)
    assert rep.method == "sampled" and rep.samples > 0 and rep.seed == 3
    again = soundness(tester, budget=100, samples=300, seed=3)
    assert rep.to_json() == again.to_json()


@pytest.mark.parametrize("family", ["hadamard", "rm", "composed", "brm"])
def test_json_roundtrip(family):
    code, tester = build_code_family(family, 2)
    back = LinearCode.from_json(code.to_json())
    assert np.array_equal(back.generator, code.generator)
    assert np.array_equal(back.parity_check, code.parity_check)
    t2 = LocalTester.from_json(tester.to_json(), back)
    assert t2.rows == tester.rows and t2.weights == tester.weights


def test_unknown_family():
    with pytest.raises(ValueError):
        build_code_family("golay", 2)
