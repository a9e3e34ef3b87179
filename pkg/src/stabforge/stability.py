"""Defect and closeness of unitary assignments, and the constructions around them.

Traces are dimension-normalized throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np
from scipy.linalg import schur

from .operators import TOL, CornerEmbedding, UnitaryAssignment, is_pvm, op_norm, tau, tracial_norm_sq
from .presentations import (
    GeneratorDistribution,
    Presentation,
    automorphism_orbit_amplify,
    evaluate_word,
    orbit_weights,
    relation_defects,
    sample_relation_indices,
)

__all__ = [
    "DefectReport",
    "ClosenessReport",
    "PullBackReport",
    "AmplificationReport",
    "InfiniteSpectralGapError",
    "defect",
    "closeness",
    "best_alignment",
    "sign_round",
    "SIGN_ROUND_CONSTANT",
    "pull_back_povm",
    "pvm_from_commuting_involutions",
    "observables_from_pvm",
    "graph_rep",
    "graph_permutations",
    "inverse_spectral_gap",
    "amplification_check",
    "character_block_farness",
    "MAX_DENSE_BITS",
    "MAX_GRAPH_BITS",
]

SIGN_ROUND_CONSTANT = (1 + 1 / np.sqrt(2)) ** 2
MAX_DENSE_BITS = 12
MAX_GRAPH_BITS = 24


@dataclass(frozen=True)
class DefectReport:
    epsilon: float
    by_tag: dict[str, float]
    relations_evaluated: int
    method: str
    samples: int = 0
    seed: int | None = None
    per_relation: tuple[float, ...] = field(default=(), repr=False)

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "by_tag": dict(sorted(self.by_tag.items())),
            "relations_evaluated": self.relations_evaluated,
            "method": self.method,
            "samples": self.samples,
            "seed": self.seed,
        }


def defect(
    A: UnitaryAssignment, P: Presentation, mode: str = "exhaustive", samples: int = 1000, seed: int | None = None
) -> DefectReport:
    """E_{r ~ mu_R} ||phi(r) - Id||_tau^2, with the contribution of each tag."""
    if len(A) != P.n_generators:
        raise ValueError(f"assignment has {len(A)} generators, presentation needs {P.n_generators}")
    I = np.eye(A.dim)
    if mode == "exhaustive":
        per = relation_defects(A, P)
        by_tag: dict[str, float] = {}
        for r, v in zip(P.relations, per):
            by_tag[r.tag] = by_tag.get(r.tag, 0.0) + r.weight * float(v)
        eps = float(np.dot(P.weights, per))
        return DefectReport(eps, by_tag, len(P), "exhaustive", per_relation=tuple(per.tolist()))
    if mode == "sampled":
        if seed is None:
            raise ValueError("sampled mode needs a seed")
        idx = sample_relation_indices(P, samples, seed)
        cache: dict[int, float] = {}
        by_tag = {}
        for i in idx:
            i = int(i)
            if i not in cache:
                cache[i] = tracial_norm_sq(evaluate_word(P.relations[i].word, A) - I)
            tag = P.relations[i].tag
            by_tag[tag] = by_tag.get(tag, 0.0) + cache[i] / samples
        eps = float(sum(by_tag.values()))
        return DefectReport(eps, by_tag, len(cache), "sampled", samples, seed)
    raise ValueError(f"unknown mode {mode!r}")


class ClosenessReport(NamedTuple):
    dist: float
    trace: float

    @property
    def delta(self) -> float:
        return max(self.dist, self.trace)


def closeness(
    A: UnitaryAssignment,
    B: UnitaryAssignment,
    w: CornerEmbedding,
    mu_S: GeneratorDistribution | Sequence[float] | None = None,
) -> ClosenessReport:
    """(E_i ||A_i - w* B_i w||^2, max of the two trace deficits of w)."""
    if len(A) != len(B):
        raise ValueError("assignments cover different generator sets")
    if w.source_dim != A.dim or w.target_dim != B.dim:
        raise ValueError(f"w is {w.target_dim}x{w.source_dim}, expected {B.dim}x{A.dim}")
    mu = _generator_weights(mu_S, len(A))
    dist = sum(m * tracial_norm_sq(A[i] - w.pull(B[i])) for i, m in enumerate(mu))
    return ClosenessReport(float(dist), w.deficit())


def _generator_weights(mu_S, n: int) -> np.ndarray:
    if mu_S is None:
        return np.full(n, 1 / n)
    mu = mu_S.as_array() if isinstance(mu_S, GeneratorDistribution) else np.asarray(mu_S, dtype=float)
    if mu.shape != (n,):
        raise ValueError("generator distribution has the wrong size")
    return mu


def best_alignment(
    A: UnitaryAssignment, B: UnitaryAssignment, mu_S=None, iterations: int = 50, w0: np.ndarray | None = None
) -> CornerEmbedding:
    """Heuristic isometry w aligning A with B, by alternating polar steps on
    E_i A_i* w* B_i. Only a local optimum; no closeness claim rests on it."""
    d, dp = A.dim, B.dim
    if dp < d:
        raise ValueError("the target must be at least as large as the source")
    mu = _generator_weights(mu_S, len(A))
    w = np.eye(dp, d, dtype=complex) if w0 is None else np.asarray(w0, dtype=complex)
    for _ in range(iterations):
        M = sum(m * A[i].conj().T @ w.conj().T @ B[i] for i, m in enumerate(mu))
        # the isometry maximizing Re Tr(M w') is the polar factor of M*
        U, _, Vh = np.linalg.svd(M.conj().T, full_matrices=False)
        w_new = U @ Vh
        if np.allclose(w_new, w, atol=1e-12):
            w = w_new
            break
        w = w_new
    return CornerEmbedding(w)


def sign_round(U: np.ndarray, return_ties: bool = False):
    """Replace every eigenvalue of the normal matrix U by the sign of its real part.

    Eigenvalues on the imaginary axis go to +1; their count is returned when
    return_ties is set."""
    U = np.asarray(U, dtype=complex)
    T, Z = schur(U, output="complex")
    lam = np.diag(T)
    if op_norm(T - np.diag(lam)) > 1e-8 * max(1.0, op_norm(U)):
        raise ValueError("matrix is not normal")
    re = lam.real
    ties = int(np.sum(np.abs(re) <= 1e-12))
    signs = np.where(re < -1e-12, -1.0, 1.0)
    V = (Z * signs) @ Z.conj().T
    V = (V + V.conj().T) / 2
    return (V, ties) if return_ties else V


@dataclass(frozen=True)
class PullBackReport:
    povm: np.ndarray = field(repr=False)
    purity: float
    epsilon: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.purity >= self.bound - 1e-12


def pull_back_povm(T: np.ndarray, w: CornerEmbedding) -> PullBackReport:
    """Q_a = w* T_a w + (Id - w* w)/|A|, with purity sum_a tau(Q_a^2) against 1 - 3 eps."""
    T = np.asarray(T, dtype=complex)
    problem = is_pvm(T)
    if problem:
        raise ValueError(f"T is not a PVM: {problem}")
    if T.shape[1] != w.target_dim:
        raise ValueError("T lives on the wrong space")
    d = w.source_dim
    defect_op = np.eye(d) - w.w.conj().T @ w.w
    Q = np.array([w.pull(Ta) + defect_op / len(T) for Ta in T])
    purity = float(sum(tau(Qa @ Qa).real for Qa in Q))
    eps = w.deficit()
    return PullBackReport(Q, purity, eps, 1 - 3 * eps)


def pvm_from_commuting_involutions(generators: Sequence[np.ndarray]) -> np.ndarray:
    """P_u = E_x (-1)^{u.x} U_x where U_x is the product of the generators in x.

    Row u of the output is P_u, with bit i of u paired with generator i."""
    gens = [np.asarray(g, dtype=complex) for g in generators]
    k = len(gens)
    if k == 0:
        raise ValueError("need at least one generator")
    d = gens[0].shape[0]
    I = np.eye(d)
    for i, g in enumerate(gens):
        if op_norm(g @ g - I) > TOL:
            raise ValueError(f"generator {i} is not an involution")
        for j in range(i):
            if op_norm(g @ gens[j] - gens[j] @ g) > TOL:
                raise ValueError(f"generators {j} and {i} do not commute")
    K = 1 << k
    U = np.empty((K, d, d), dtype=complex)
    U[0] = I
    for x in range(1, K):
        low = (x & -x).bit_length() - 1
        U[x] = U[x ^ (1 << low)] @ gens[low]
    signs = _walsh_signs(k)
    return np.einsum("ux,xab->uab", signs, U) / K


def observables_from_pvm(P: np.ndarray) -> np.ndarray:
    """U_x = sum_u (-1)^{u.x} P_u, the inverse of the transform above."""
    K = P.shape[0]
    k = K.bit_length() - 1
    if 1 << k != K:
        raise ValueError("outcome count must be a power of two")
    return np.einsum("xu,uab->xab", _walsh_signs(k), P)


def _walsh_signs(k: int) -> np.ndarray:
    idx = np.arange(1 << k)
    par = np.array([bin(v).count("1") & 1 for v in range(1 << k)])
    return 1 - 2 * par[idx[:, None] & idx[None, :]]


def graph_permutations(k: int, edges: Sequence[tuple[int, int]]) -> np.ndarray:
    """Permutations of F_2^{[k] + E}: bit i is NOT-ed and, for each edge {i, j}
    with i < j, bit j controls a flip of that edge's bit.

    Row i maps state s to its image; vertex i is bit i, edge e is bit k + e."""
    E = _normalize_edges(k, edges)
    bits = k + len(E)
    if bits > MAX_GRAPH_BITS:
        raise ValueError(f"{bits} bits exceed the budget of {MAX_GRAPH_BITS}")
    s = np.arange(1 << bits, dtype=np.int64)
    out = np.empty((k, s.size), dtype=np.int64)
    for i in range(k):
        img = s ^ (1 << i)
        for e, (a, b) in enumerate(E):
            if a == i:
                img ^= ((s >> b) & 1) << (k + e)
        out[i] = img
    return out


def _normalize_edges(k: int, edges) -> list[tuple[int, int]]:
    E = []
    for a, b in edges:
        a, b = int(a), int(b)
        if a == b or not (0 <= a < k and 0 <= b < k):
            raise ValueError(f"bad edge {(a, b)}")
        E.append((min(a, b), max(a, b)))
    if len(set(E)) != len(E):
        raise ValueError("repeated edge")
    return sorted(E)


def graph_rep(k: int, edges: Sequence[tuple[int, int]]) -> UnitaryAssignment:
    """Dense permutation matrices of the graph construction (at most 2^12 dims)."""
    perms = graph_permutations(k, edges)
    D = perms.shape[1]
    if D > 1 << MAX_DENSE_BITS:
        raise ValueError(f"dimension {D} too large for dense matrices; use graph_permutations")
    mats = np.zeros((k, D, D))
    cols = np.arange(D)
    for i in range(k):
        mats[i, perms[i], cols] = 1.0
    return UnitaryAssignment(mats, check=False)


class InfiniteSpectralGapError(ValueError):
    """Some nonzero character has Fourier coefficient 1: the walk is disconnected."""


def inverse_spectral_gap(mu: Sequence) -> float | Fraction:
    """max over a != 0 of 1 / (1 - E_{b ~ mu} (-1)^{a.b}).

    Exact when mu is given as Fractions."""
    K = len(mu)
    k = K.bit_length() - 1
    if K < 2 or 1 << k != K:
        raise ValueError("mu must have length 2^k with k >= 1")
    if k > 20:
        raise ValueError("k must be at most 20")
    exact = all(isinstance(v, (Fraction, int)) for v in mu)
    if exact:
        f = [Fraction(v) for v in mu]
        if any(v < 0 for v in f) or sum(f) != 1:
            raise ValueError("mu must be a probability distribution")
        h = 1
        while h < K:
            for i in range(0, K, 2 * h):
                for j in range(i, i + h):
                    f[j], f[j + h] = f[j] + f[j + h], f[j] - f[j + h]
            h *= 2
        top = max(f[1:])
        if top == 1:
            raise InfiniteSpectralGapError("some nonzero character is fixed by mu")
        return 1 / (1 - top)
    arr = np.asarray(mu, dtype=float)
    if np.any(arr < 0) or abs(arr.sum() - 1) > 1e-12:
        raise ValueError("mu must be a probability distribution")
    f = arr.copy()
    h = 1
    while h < K:
        f = f.reshape(-1, 2, h)
        f = np.stack([f[:, 0] + f[:, 1], f[:, 0] - f[:, 1]], axis=1).reshape(K)
        h *= 2
    top = float(f[1:].max())
    if top >= 1 - 1e-12:
        raise InfiniteSpectralGapError("some nonzero character is fixed by mu")
    return 1 / (1 - top)


@dataclass(frozen=True)
class AmplificationReport:
    group_order: int
    orbit_weights: tuple[float, ...]
    epsilon: float
    bound: float
    relation_defects: tuple[float, ...]
    uniform_on_orbits: bool

    @property
    def worst(self) -> float:
        return max(self.relation_defects, default=0.0)

    @property
    def holds(self) -> bool:
        return self.worst <= self.bound + 1e-12

    def to_json(self) -> dict:
        return {
            "group_order": self.group_order,
            "orbit_weights": list(self.orbit_weights),
            "epsilon": self.epsilon,
            "bound": self.bound,
            "worst_relation_defect": self.worst,
            "uniform_on_orbits": self.uniform_on_orbits,
            "holds": self.holds,
        }


def amplification_check(A: UnitaryAssignment, perms, P: Presentation) -> AmplificationReport:
    """Amplify A over the group generated by perms and compare every relation's
    defect with max_i(1/w_i) * eps."""
    orbits, weights = orbit_weights(P, perms)
    uniform = all(
        np.allclose([P.relations[i].weight for i in orb], P.relations[orb[0]].weight, atol=1e-15) for orb in orbits
    )
    eps = defect(A, P).epsilon
    amplified = automorphism_orbit_amplify(A, perms, P)
    per = relation_defects(amplified, P)
    live = [w for w in weights if w > 0]
    bound = max(1 / w for w in live) * eps if live else 0.0
    order = amplified.dim // A.dim
    return AmplificationReport(order, tuple(weights), eps, bound, tuple(per.tolist()), uniform)


def character_block_farness(A: UnitaryAssignment, mu_S=None) -> float:
    """Distance from A to the nearest representation that is diagonal in the
    standard basis with +-1 entries (a direct sum of one-dimensional characters).

    This is only a partial check of farness from all representations."""
    mu = _generator_weights(mu_S, len(A))
    # the best character on each basis state matches the sign of each diagonal entry
    overlap = np.array([np.abs(np.real(np.diag(A[i]))).mean() for i in range(len(A))])
    return float(np.dot(mu, 2 - 2 * overlap))
