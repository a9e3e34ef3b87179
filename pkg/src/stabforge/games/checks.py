"""Quantitative relations between nearby strategies.

Every check returns both sides of its inequality so callers can report the
slack; none of them asserts.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..operators import CornerEmbedding, random_hermitian
from .braiding import LazyMeasurements
from .code_game import CodeGame, extract_homomorphism
from .core import Game, SynchronousStrategy, game_value, qid_to_str

__all__ = [
    "ClosenessBreakdown",
    "strategy_closeness",
    "l1_bound_check",
    "value_gap_check",
    "data_processing_check",
    "min_dimension_bound",
    "perturb_strategy",
    "ExtractionPoint",
    "extraction_sweep",
]


@dataclass(frozen=True)
class ClosenessBreakdown:
    distance: float
    source_deficit: float
    target_deficit: float

    @property
    def delta(self) -> float:
        return max(self.distance, self.source_deficit, self.target_deficit)


def _weights(game_or_mu, questions) -> dict:
    if isinstance(game_or_mu, Game):
        return game_or_mu.marginal()
    if game_or_mu is None:
        qs = list(questions)
        return {q: 1 / len(qs) for q in qs}
    return dict(game_or_mu)


def _check_shapes(S: SynchronousStrategy, T: SynchronousStrategy, w: CornerEmbedding) -> None:
    if w.source_dim != S.dim or w.target_dim != T.dim:
        raise ValueError(f"w is {w.target_dim}x{w.source_dim}, strategies have dimensions {S.dim} and {T.dim}")


def _pulled(T: SynchronousStrategy, q, w: CornerEmbedding) -> np.ndarray:
    Q = T[q]
    return np.conj(w.w.T)[None] @ Q @ w.w[None]


def strategy_closeness(
    S: SynchronousStrategy,
    T: SynchronousStrategy,
    w: CornerEmbedding | None = None,
    mu: Game | Mapping | None = None,
) -> ClosenessBreakdown:
    """E_x sum_a ||P^x_a - w* Q^x_a w||_tau^2 with x from the symmetrized
    marginal of the game, together with the two trace deficits of w."""
    w = w or CornerEmbedding.identity(S.dim)
    _check_shapes(S, T, w)
    weights = _weights(mu, S.pvms)
    dist = 0.0
    for q, p in weights.items():
        P, Q = S[q], _pulled(T, q, w)
        if P.shape != Q.shape:
            raise ValueError(f"question {q!r} has {len(P)} and {len(Q)} outcomes")
        dist += p * float(np.vdot(P - Q, P - Q).real) / S.dim
    return ClosenessBreakdown(dist, w.source_deficit(), w.target_deficit())


def l1_bound_check(
    S: SynchronousStrategy,
    T: SynchronousStrategy,
    w: CornerEmbedding | None = None,
    mu: Game | Mapping | None = None,
) -> tuple[float, float]:
    """(E_x sum_a tau|P_a - w* Q_a w|, eps + 2 sqrt(eps))."""
    w = w or CornerEmbedding.identity(S.dim)
    eps = strategy_closeness(S, T, w, mu).delta
    weights = _weights(mu, S.pvms)
    lhs = 0.0
    for q, p in weights.items():
        diff = S[q] - _pulled(T, q, w)
        lhs += p * float(np.linalg.svd(diff, compute_uv=False).sum()) / S.dim
    return lhs, eps + 2 * np.sqrt(eps)


def value_gap_check(
    game: Game, S: SynchronousStrategy, T: SynchronousStrategy, w: CornerEmbedding | None = None
) -> tuple[float, float]:
    """(|omega(S) - omega(T)|, 8 sqrt(eps)) with eps the closeness under the game's marginal."""
    w = w or CornerEmbedding.identity(S.dim)
    eps = strategy_closeness(S, T, w, game).delta
    gap = abs(game_value(game, S).omega - game_value(game, T).omega)
    return gap, 8 * np.sqrt(eps)


def data_processing_check(P: np.ndarray, Q: np.ndarray, f: Sequence[int]) -> tuple[float, float]:
    """(sum_b ||sum_{f(a)=b} (P_a - Q_a)||^2, sum_a ||P_a - Q_a||^2), tracial norms."""
    P = np.asarray(P)
    Q = np.asarray(Q)
    if P.shape != Q.shape:
        raise ValueError("measurements have different shapes")
    f = list(f)
    if len(f) != len(P):
        raise ValueError("the outcome map must be defined on every outcome")
    d = P.shape[1]
    diff = P - Q
    rhs = float(np.vdot(diff, diff).real) / d
    lhs = 0.0
    for b in sorted(set(f)):
        block = diff[[a for a, fa in enumerate(f) if fa == b]].sum(axis=0)
        lhs += float(np.vdot(block, block).real) / d
    return lhs, rhs


def min_dimension_bound(k: int, delta: float, c: float = 1.0) -> float:
    """2^k / (1 + c sqrt(delta) + delta / (1 - delta))."""
    if not 0 <= delta < 1:
        raise ValueError("delta must lie in [0, 1)")
    if c < 0:
        raise ValueError("c must be nonnegative")
    return 2.0**k / (1 + c * np.sqrt(delta) + delta / (1 - delta))


def _question_rng(seed: int, q) -> np.random.Generator:
    digest = hashlib.sha256(qid_to_str(q).encode()).digest()
    words = np.frombuffer(digest[:16], dtype=np.uint32).tolist()
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *words])))


def _rotation(d: int, theta: float, rng: np.random.Generator) -> np.ndarray:
    H = random_hermitian(d, rng, 1.0)
    lam, V = np.linalg.eigh(H)
    return (V * np.exp(1j * theta * lam)) @ V.conj().T


def perturb_strategy(S: SynchronousStrategy, theta: float, seed: int) -> SynchronousStrategy:
    """Conjugate each question's PVM by exp(i theta H_x), with H_x a random
    Hermitian matrix of operator norm 1 drawn from a stream keyed by the
    question, so the result does not depend on evaluation order."""
    d = S.dim
    rotations: dict = {}

    def factory(q):
        if q not in rotations:
            rotations[q] = _rotation(d, theta, _question_rng(seed, q))
        U = rotations[q]
        return U[None] @ S[q] @ U.conj().T[None]

    out = SynchronousStrategy(d, LazyMeasurements(list(S.pvms), factory))
    if hasattr(S, "pauli_dim"):
        out.pauli_dim = S.pauli_dim
    return out


@dataclass(frozen=True)
class ExtractionPoint:
    theta: float
    game_deficit: float
    presentation_defect: float

    def to_json(self) -> dict:
        return {"theta": self.theta, "game_deficit": self.game_deficit, "presentation_defect": self.presentation_defect}


def extraction_sweep(
    game: CodeGame, strategy: SynchronousStrategy, thetas: Sequence[float], seed: int
) -> list[ExtractionPoint]:
    """Perturb a strategy for the code game at each angle and extract the
    variable observables; the same random directions are used at every angle."""
    out = []
    for theta in thetas:
        rep = extract_homomorphism(game, perturb_strategy(strategy, float(theta), seed))
        out.append(ExtractionPoint(float(theta), rep.game_deficit, rep.presentation_defect))
    return out
