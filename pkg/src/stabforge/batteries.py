"""Seeded randomized checks of the quantitative inequalities.

Each battery draws its trials from its own labeled stream and reports the
worst margin lhs - rhs; a positive margin is a violation.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .games.checks import data_processing_check, l1_bound_check, value_gap_check
from .games.core import Game, SynchronousStrategy
from .operators import (
    CornerEmbedding,
    haar_unitary,
    random_hermitian,
    random_partial_isometry,
    random_pvm,
    tracial_norm_sq,
)
from .stability import SIGN_ROUND_CONSTANT, pull_back_povm, sign_round

__all__ = [
    "labeled_rng",
    "BatteryReport",
    "BATTERIES",
    "run_battery",
    "l1_battery",
    "value_gap_battery",
    "data_processing_battery",
    "purity_battery",
    "sign_round_battery",
]

SLACK = 1e-10


def labeled_rng(seed: int, *labels: str) -> np.random.Generator:
    """Counter-based stream keyed by the seed and a path of labels."""
    words = []
    for label in labels:
        digest = hashlib.sha256(label.encode()).digest()
        words.extend(np.frombuffer(digest[:8], dtype=np.uint32).tolist())
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *words])))


@dataclass(frozen=True)
class BatteryReport:
    name: str
    trials: int
    violations: int
    worst_margin: float
    seed: int

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "trials": self.trials,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "seed": self.seed,
            "tolerance": SLACK,
        }


def _tally(name: str, margins: list[float], seed: int) -> BatteryReport:
    m = np.array(margins)
    return BatteryReport(name, len(m), int(np.sum(m > SLACK)), float(m.max()), seed)


def _rotation(d: int, theta: float, rng: np.random.Generator) -> np.ndarray:
    lam, V = np.linalg.eigh(random_hermitian(d, rng))
    return (V * np.exp(1j * theta * lam)) @ V.conj().T


def _random_questions(rng: np.random.Generator) -> dict:
    return {(i,): int(rng.integers(2, 4)) for i in range(int(rng.integers(2, 5)))}


def _random_strategy(questions: dict, d: int, rng: np.random.Generator) -> SynchronousStrategy:
    return SynchronousStrategy(d, {q: random_pvm(d, a, rng) for q, a in questions.items()})


def _nearby(S: SynchronousStrategy, questions: dict, rng: np.random.Generator):
    """A strategy on a possibly larger space and a partial isometry relating it to S.

    Half the time S is embedded as a corner of a rotated direct sum; otherwise
    both the strategy and the partial isometry are unrelated to S."""
    d = S.dim
    extra = int(rng.integers(0, 3))
    dp = d + extra
    if rng.random() < 0.5:
        theta = float(10 ** rng.uniform(-3, 0))
        U = _rotation(dp, theta, rng)
        pvms = {}
        for q, a in questions.items():
            block = np.zeros((a, dp, dp), dtype=complex)
            block[:, :d, :d] = S[q]
            if extra:
                block[:, d:, d:] = random_pvm(extra, a, rng)
            pvms[q] = U[None] @ block @ U.conj().T[None]
        return SynchronousStrategy(dp, pvms), CornerEmbedding.inclusion(d, dp)
    rank = int(rng.integers(1, d + 1))
    return _random_strategy(questions, dp, rng), random_partial_isometry(dp, d, rank, rng)


def l1_battery(trials: int = 500, seed: int = 0) -> BatteryReport:
    rng = labeled_rng(seed, "l1")
    margins = []
    for _ in range(trials):
        questions = _random_questions(rng)
        S = _random_strategy(questions, int(rng.integers(1, 6)), rng)
        T, w = _nearby(S, questions, rng)
        lhs, rhs = l1_bound_check(S, T, w)
        margins.append(lhs - rhs)
    return _tally("l1-bound", margins, seed)


def _random_game(questions: dict, rng: np.random.Generator) -> Game:
    qs = list(questions)
    pairs = [(x, y) for i, x in enumerate(qs) for y in qs[i:]]
    chosen = [p for p in pairs if rng.random() < 0.6] or [pairs[0]]
    w = rng.random(len(chosen))
    mu = {p: float(v) for p, v in zip(chosen, w / w.sum())}
    tables = {}
    for x, y in chosen:
        T = rng.random((questions[x], questions[y])) < 0.5
        if x == y:
            T = T | T.T
        tables[(x, y)] = T
        tables[(y, x)] = T.T

    def table(x, y):
        return tables.get((x, y), np.ones((questions[x], questions[y]), dtype=bool))

    return Game(questions, mu, table, name="random")


def value_gap_battery(trials: int = 200, seed: int = 0) -> BatteryReport:
    rng = labeled_rng(seed, "value-gap")
    margins = []
    for _ in range(trials):
        questions = _random_questions(rng)
        game = _random_game(questions, rng)
        S = _random_strategy(questions, int(rng.integers(1, 6)), rng)
        T, w = _nearby(S, questions, rng)
        gap, bound = value_gap_check(game, S, T, w)
        margins.append(gap - bound)
    return _tally("value-gap", margins, seed)


def data_processing_battery(trials: int = 500, seed: int = 0) -> BatteryReport:
    rng = labeled_rng(seed, "data-processing")
    margins = []
    for _ in range(trials):
        d = int(rng.integers(1, 7))
        a = int(rng.integers(2, 6))
        P = random_pvm(d, a, rng)
        if rng.random() < 0.5:
            U = _rotation(d, float(10 ** rng.uniform(-3, 0)), rng)
            Q = U[None] @ P @ U.conj().T[None]
        else:
            Q = random_pvm(d, a, rng)
        f = rng.integers(0, int(rng.integers(1, a + 1)), size=a)
        lhs, rhs = data_processing_check(P, Q, f)
        margins.append(lhs - rhs)
    return _tally("data-processing", margins, seed)


def purity_battery(trials: int = 500, seed: int = 0) -> BatteryReport:
    rng = labeled_rng(seed, "purity")
    margins = []
    for _ in range(trials):
        dp = int(rng.integers(1, 9))
        d = int(rng.integers(1, dp + 1))
        rank = int(rng.integers(0, d + 1))
        T = random_pvm(dp, int(rng.integers(1, 5)), rng)
        w = random_partial_isometry(dp, d, rank, rng) if rank else CornerEmbedding(np.zeros((dp, d)))
        rep = pull_back_povm(T, w)
        margins.append(rep.bound - rep.purity)
    return _tally("pull-back-purity", margins, seed)


def _near_involution(d: int, rng: np.random.Generator) -> np.ndarray:
    V = haar_unitary(d, rng)
    signs = rng.choice([-1.0, 1.0], size=d)
    S = (V * signs) @ V.conj().T
    return S @ _rotation(d, float(rng.uniform(0, np.pi)), rng)


def sign_round_battery(trials: int = 1000, seed: int = 0) -> BatteryReport:
    rng = labeled_rng(seed, "sign-round")
    margins = []
    for _ in range(trials):
        d = int(rng.integers(1, 9))
        U = haar_unitary(d, rng) if rng.random() < 0.5 else _near_involution(d, rng)
        V = sign_round(U)
        lhs = tracial_norm_sq(V - U)
        rhs = SIGN_ROUND_CONSTANT * tracial_norm_sq(U @ U - np.eye(d))
        margins.append(lhs - rhs)
    return _tally("sign-round", margins, seed)


BATTERIES = {
    "l1-bound": (l1_battery, 500),
    "value-gap": (value_gap_battery, 200),
    "data-processing": (data_processing_battery, 500),
    "pull-back-purity": (purity_battery, 500),
    "sign-round": (sign_round_battery, 1000),
}


def run_battery(name: str, trials: int | None = None, seed: int = 0) -> BatteryReport:
    if name not in BATTERIES:
        raise ValueError(f"unknown battery {name!r}; expected one of {sorted(BATTERIES)}")
    fn, default = BATTERIES[name]
    return fn(trials or default, seed)
