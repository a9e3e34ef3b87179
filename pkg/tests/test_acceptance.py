"""Acceptance criteria, one PASS/FAIL line each.

Runs under pytest (lines are printed even when output is captured) or
directly with `python3 tests/test_acceptance.py`.
"""

from __future__ import annotations

import itertools
import json
import sys
import time
from fractions import Fraction
from math import comb

import numpy as np
import pytest

from stabforge.batteries import BATTERIES, run_battery
from stabforge.codes import (
    brm_tester,
    code_distance,
    compose_with_hadamard,
    evaluate_polynomial,
    field_rank,
    hadamard_code,
    reed_muller_code,
    rm_tester,
    tester_soundness as soundness,
)
from stabforge.fields import find_self_dual_basis
from stabforge.games import (
    braiding_test,
    code_game,
    extraction_sweep,
    game_value,
    min_dimension_bound,
    perfect_braiding_strategy,
    perfect_code_strategy,
    perfect_qld_strategy,
    qld_test,
)
from stabforge.operators import is_pvm, tracial_norm_sq
from stabforge.presentations import abelian_rank, orbit_weights, std_z2k
from stabforge.runner import ExperimentConfig, render_report, run_experiment
from stabforge.stability import (
    amplification_check,
    defect,
    graph_rep,
    inverse_spectral_gap,
    observables_from_pvm,
    pvm_from_commuting_involutions,
)

F4 = find_self_dual_basis(2)
SYM3 = [(1, 0, 2), (1, 2, 0)]


def _timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def c01_code_parameters():
    def work():
        had = [(t, *(lambda c: (c.n, c.k, code_distance(c)))(hadamard_code(t)[0])) for t in (2, 3)]
        rm1 = reed_muller_code(F4, 1, 1)
        rm2 = reed_muller_code(F4, 2, 1)
        return had, rm1, rm2

    (had, rm1, rm2), dt = _timed(work)
    ok_had = all((n, k, d) == (2**t, t, 2 ** (t - 1)) for t, n, k, d in had)
    d1 = code_distance(rm1)
    ok_rm = rm1.k == 2 and rm2.k == 4 and d1 >= (1 - 1 / 4) * 4
    return ok_had and ok_rm and dt < 1, f"hadamard {[(n, k, d) for _, n, k, d in had]}, rm m=1 [4,{rm1.k},{d1}], rm m=2 k={rm2.k}, {dt:.2f}s"


def c02_composition():
    def work():
        rm = reed_muller_code(F4, 1, 1)
        code, tester = compose_with_hadamard(rm, rm_tester(rm, 1, 1))
        return code, field_rank(code.field, tester.dense()), code_distance(code)

    (code, rank, dist), dt = _timed(work)
    ok = (code.n, code.k) == (16, 4) and rank == 16 - 4 and dist >= 6 and dt < 1
    return ok, f"[{code.n},{code.k},{dist}], rank(h') = {rank}, {dt:.2f}s"


def c03_soundness():
    def work():
        rm = reed_muller_code(F4, 1, 1)
        return soundness(rm_tester(rm, 1, 1), method="exhaustive")

    rep, dt = _timed(work)
    ok = isinstance(rep.rho, Fraction) and rep.rho >= Fraction(1, 6) and dt < 5
    return ok, f"rho = {rep.rho} over {rep.samples} non-codewords, {dt:.2f}s"


def c04_schwartz_zippel():
    rng = np.random.default_rng(4)
    pts = list(itertools.product(range(4), repeat=2))
    monomials = [(0, 0), (1, 0), (0, 1)]
    worst = Fraction(0)
    start = time.perf_counter()
    for _ in range(100):
        while True:
            f = dict(zip(monomials, map(int, rng.integers(0, 4, 3))))
            g = dict(zip(monomials, map(int, rng.integers(0, 4, 3))))
            if f != g:
                break
        agree = sum(evaluate_polynomial(F4, f, p) == evaluate_polynomial(F4, g, p) for p in pts)
        worst = max(worst, Fraction(agree, 16))
    dt = time.perf_counter() - start
    return worst <= Fraction(1, 4) and dt < 1, f"max agreement {worst} over 100 pairs, {dt:.2f}s"


def c05_abelian_rank():
    start = time.perf_counter()
    rows = []
    for t in (1, 2, 3):
        code, tester = hadamard_code(t)
        rows.append((f"hadamard t={t}", abelian_rank(tester.dense()), code.k))
    rm = reed_muller_code(F4, 1, 1)
    composed, ctester = compose_with_hadamard(rm, rm_tester(rm, 1, 1))
    rows.append(("composed q=4", abelian_rank(ctester.dense()), composed.k))
    brm, btester = brm_tester(2, 1, 1)
    rows.append(("brm q=4", abelian_rank(btester.dense()), brm.k))
    # over F_4 the same identity reads n - rank_F4(h) = k
    for m in (1, 2):
        rmc = reed_muller_code(F4, m, 1)
        rows.append((f"rm q=4 m={m} (field rank)", rmc.n - field_rank(F4, rm_tester(rmc, m, 1).dense()), rmc.k))
    dt = time.perf_counter() - start
    ok = all(a == b for _, a, b in rows) and dt < 1
    return ok, ", ".join(f"{name}: {a}={b}" for name, a, b in rows) + f", {dt:.2f}s"


def c06_graph_construction():
    edges = [(0, 1), (2, 3)]
    A, dt0 = _timed(lambda: graph_rep(4, edges))
    start = time.perf_counter()
    worst = 0.0
    for i, j in itertools.combinations(range(4), 2):
        n = tracial_norm_sq(A[i] @ A[j] - A[j] @ A[i])
        worst = max(worst, abs(n - (2.0 if (i, j) in edges else 0.0)))
    eps = defect(A, std_z2k(4)).epsilon
    dt = dt0 + time.perf_counter() - start
    ok = worst <= 1e-12 and abs(eps - 2 / comb(4, 2)) <= 1e-12 and dt < 10
    return ok, f"dim {A.dim}, commutator error {worst:.1e}, defect {eps!r}, {dt:.2f}s"


def c07_perfect_values():
    def work():
        code, tester = hadamard_code(2)
        g1 = braiding_test(code, tester)
        w1 = game_value(g1, perfect_braiding_strategy(g1)).omega
        g2 = qld_test(2, 1, 1)
        w2 = game_value(g2, perfect_qld_strategy(g2)).omega
        return w1, w2

    (w1, w2), dt = _timed(work)
    ok = abs(w1 - 1) <= 1e-9 and abs(w2 - 1) <= 1e-9 and dt < 30
    return ok, f"braiding 1-omega = {1 - w1:.1e}, qld 1-omega = {1 - w2:.1e}, {dt:.1f}s"


def c08_batteries():
    start = time.perf_counter()
    reports = [run_battery(name, seed=0) for name in sorted(BATTERIES)]
    dt = time.perf_counter() - start
    ok = all(r.passed and 200 <= r.trials <= 1000 for r in reports) and dt < 60
    detail = ", ".join(f"{r.name} {r.violations}/{r.trials}" for r in reports)
    return ok, f"violations: {detail}, {dt:.1f}s"


def c09_fourier():
    worst = 0.0
    Z = np.diag([1.0, -1.0])
    for k in range(1, 5):
        gens = []
        for i in range(k):
            M = np.eye(1)
            for j in range(k):
                M = np.kron(M, Z if i == j else np.eye(2))
            gens.append(M)
        families = [gens, list(graph_rep(k, []).matrices)]
        for fam in families:
            P = pvm_from_commuting_involutions(fam)
            if is_pvm(P) is not None:
                return False, f"not a PVM at k={k}"
            U = observables_from_pvm(P)
            for x in range(1 << k):
                expect = np.eye(fam[0].shape[0])
                for i in range(k):
                    if (x >> i) & 1:
                        expect = expect @ fam[i]
                worst = max(worst, float(np.abs(U[x] - expect).max()))
    return worst <= 1e-9, f"max round-trip error {worst:.1e} (k <= 4, Pauli-Z and edgeless graphs)"


def c10_spectral_gap():
    for k in range(1, 11):
        K = 1 << k
        basis = [Fraction(0)] * K
        for i in range(k):
            basis[1 << i] = Fraction(1, k)
        if inverse_spectral_gap([Fraction(1, K)] * K) != 1 or inverse_spectral_gap(basis) != Fraction(k, 2):
            return False, f"mismatch at k={k}"
    return True, "kappa(uniform) = 1 and kappa(basis) = k/2 exactly for k = 1..10"


def c11_extraction_trend():
    code, tester = hadamard_code(2)
    game = code_game(code, tester)
    pts = extraction_sweep(game, perfect_code_strategy(game, code), np.geomspace(1e-3, 0.1, 10), seed=0)
    r = tester.locality
    within = all(p.presentation_defect <= 100 * r * p.game_deficit for p in pts)
    defects = [p.presentation_defect for p in pts]
    monotone = all(a <= b for a, b in zip(defects, defects[1:]))
    ratio = max(p.presentation_defect / p.game_deficit for p in pts)
    return within and monotone, f"{len(pts)} points, max defect/eps = {ratio:.1f} (limit {100 * r}), monotone = {monotone}"


def c12_dimension_bound():
    zero = all(min_dimension_bound(k, 0.0, c) == 2.0**k for k in range(1, 9) for c in (0.0, 1.0, 10.0))
    game = qld_test(2, 1, 1)
    S = perfect_qld_strategy(game)
    return zero and S.pauli_dim == 16, f"bound(k, 0, c) = 2^k: {zero}; QLD Pauli leg {S.pauli_dim} (total {S.dim})"


def c13_amplification():
    start = time.perf_counter()
    P = std_z2k(3)
    _, weights = orbit_weights(P, SYM3)
    rep = amplification_check(graph_rep(3, [(0, 1)]), SYM3, P)
    dt = time.perf_counter() - start
    ok = sorted(weights) == pytest.approx([0.5, 0.5]) and rep.holds and dt < 10
    return ok, f"orbit weights {sorted(weights)}, worst {rep.worst:.4f} <= bound {rep.bound:.4f}, {dt:.2f}s"


def c14_reproducibility():
    configs = [
        ExperimentConfig("battery", {"trials": 50}, seed=11),
        ExperimentConfig("extraction-sweep", {"points": 5}, seed=11),
        ExperimentConfig("perturbation-sweep", {"points": 4}, seed=11),
        ExperimentConfig("code-soundness", {"family": "brm", "t": 2, "budget": 1000, "samples": 200}, seed=11),
    ]
    for cfg in configs:
        texts = []
        for _ in range(2):
            data = json.loads(render_report(run_experiment(cfg)))
            data.pop("timestamp")
            texts.append(json.dumps(data, sort_keys=True))
        if texts[0] != texts[1]:
            return False, f"{cfg.kind} differs between runs"
    return True, f"{len(configs)} seeded experiments identical modulo timestamp"


CRITERIA = [
    (1, "code parameters", c01_code_parameters),
    (2, "composition", c02_composition),
    (3, "tester soundness", c03_soundness),
    (4, "Schwartz-Zippel", c04_schwartz_zippel),
    (5, "abelian rank equals code dimension", c05_abelian_rank),
    (6, "graph construction", c06_graph_construction),
    (7, "perfect strategy values", c07_perfect_values),
    (8, "inequality batteries", c08_batteries),
    (9, "Fourier correspondence", c09_fourier),
    (10, "spectral gap", c10_spectral_gap),
    (11, "extraction trend", c11_extraction_trend),
    (12, "dimension bound", c12_dimension_bound),
    (13, "L-infinity amplification", c13_amplification),
    (14, "reproducibility", c14_reproducibility),
]


def _line(num: int, name: str, ok: bool, detail: str) -> str:
    return f"{'PASS' if ok else 'FAIL'} [{num:2d}] {name}: {detail}"


@pytest.mark.parametrize("num,name,fn", CRITERIA, ids=[f"c{n:02d}" for n, _, _ in CRITERIA])
def test_criterion(num, name, fn, capsys):
    try:
        ok, detail = fn()
    except Exception as exc:  # report, then fail
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    with capsys.disabled():
        print("\n" + _line(num, name, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for num, name, fn in CRITERIA:
        ok, detail = fn()
        failures += not ok
        print(_line(num, name, ok, detail), flush=True)
    sys.exit(1 if failures else 0)
