"""The code game of a binary local tester and homomorphism extraction."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..codes import LinearCode, LocalTester
from ..operators import UnitaryAssignment
from ..presentations import Presentation, presentation_from_parity_check
from ..stability import defect
from .core import Game, SynchronousStrategy, game_value

__all__ = [
    "CodeGame",
    "code_game",
    "codeword_strategy",
    "perfect_code_strategy",
    "ExtractionReport",
    "extract_homomorphism",
]


class CodeGame(Game):
    """Game with questions ("eq", j) and ("var", i); keeps the row supports."""

    supports: list[tuple[int, ...]]
    n: int


def _parity_table(size: int) -> np.ndarray:
    a = np.arange(1 << size)
    return np.bitwise_count(a.astype(np.uint64)) & 1


def code_game(
    code: LinearCode,
    tester: LocalTester,
    row_weights: str = "uniform",
    drop_zero_rows: bool = False,
) -> CodeGame:
    """mu((eq, j), (var, i)) = w_j / |row j| for i in row j.

    Answers to ("eq", j) are bitmasks over the row's support in increasing
    column order. The referee accepts when the row answer has even parity and
    agrees with the variable answer at that column."""
    if code.q != 2:
        raise ValueError("the code game needs a binary code")
    supports = [tuple(c for c, _ in row) for row in tester.rows]
    weights = list(tester.weights) if row_weights == "tester" else [Fraction(1)] * len(supports)
    if row_weights not in ("uniform", "tester"):
        raise ValueError("row_weights must be 'uniform' or 'tester'")
    keep = [j for j, s in enumerate(supports) if s]
    if len(keep) < len(supports) and not drop_zero_rows:
        raise ValueError(f"tester row {supports.index(())} has weight zero")
    total = sum(weights[j] for j in keep)
    if total == 0:
        raise ValueError("no row carries weight")
    questions: dict = {("var", i): 2 for i in range(code.n)}
    mu: dict = {}
    tags: dict = {}
    for j in keep:
        s = supports[j]
        questions[("eq", j)] = 1 << len(s)
        for i in s:
            pair = (("eq", j), ("var", i))
            mu[pair] = float(weights[j] / total / len(s))
            tags[pair] = "code"
    positions = {j: {c: p for p, c in enumerate(supports[j])} for j in keep}

    def table(x, y):
        if x[0] == "var" and y[0] == "eq":
            return table(y, x).T
        if x[0] == "eq" and y[0] == "var" and y[1] in positions[x[1]]:
            size = len(supports[x[1]])
            a = np.arange(1 << size)
            bit = (a >> positions[x[1]][y[1]]) & 1
            even = _parity_table(size) == 0
            return even[:, None] & (bit[:, None] == np.arange(2)[None, :])
        return np.ones((questions[x], questions[y]), dtype=bool)

    game = CodeGame(questions, mu, table, name=f"code-game({code.name})", tags=tags)
    game.supports = [supports[j] if j in positions else () for j in range(len(supports))]
    game.n = code.n
    return game


def codeword_strategy(game: CodeGame, word: Sequence[int]) -> SynchronousStrategy:
    """One-dimensional strategy answering variable i with word[i] and each
    row with the restriction of word to its support."""
    pvms = {}
    for q, size in game.questions.items():
        P = np.zeros((size, 1, 1))
        if q[0] == "var":
            P[int(word[q[1]]) & 1, 0, 0] = 1
        else:
            ans = sum((int(word[c]) & 1) << p for p, c in enumerate(game.supports[q[1]]))
            P[ans, 0, 0] = 1
        pvms[q] = P
    return SynchronousStrategy(1, pvms)


def perfect_code_strategy(game: CodeGame, code: LinearCode) -> SynchronousStrategy:
    """Uniform mixture over all codewords, as a diagonal strategy of dimension |C|."""
    words = code.codewords()
    d = len(words)
    pvms = {}
    for q, size in game.questions.items():
        if q[0] == "var":
            ans = words[:, q[1]] & 1
        else:
            ans = np.zeros(d, dtype=np.int64)
            for p, c in enumerate(game.supports[q[1]]):
                ans |= (words[:, c] & 1) << p
        P = np.zeros((size, d, d))
        P[ans, np.arange(d), np.arange(d)] = 1
        pvms[q] = P
    return SynchronousStrategy(d, pvms)


@dataclass(frozen=True)
class ExtractionReport:
    assignment: UnitaryAssignment
    game_deficit: float
    presentation_defect: float
    presentation: Presentation

    def to_json(self) -> dict:
        return {
            "game_deficit": self.game_deficit,
            "presentation_defect": self.presentation_defect,
            "generators": len(self.assignment),
            "dimension": self.assignment.dim,
        }


def extract_homomorphism(game: CodeGame, strategy: SynchronousStrategy) -> ExtractionReport:
    """Map x_i to the variable observable P_0 - P_1 and measure how far that is
    from a homomorphism of G(h) under the game-induced relation weights."""
    strategy.validate(game)
    obs = np.array([strategy.observable(("var", i)) for i in range(game.n)], dtype=complex)
    A = UnitaryAssignment(obs)
    h = np.zeros((len(game.supports), game.n), dtype=np.int64)
    for j, s in enumerate(game.supports):
        h[j, list(s)] = 1
    pres = presentation_from_parity_check(h, mu_spec="game")
    eps = 1.0 - game_value(game, strategy, validate=False).omega
    rep = defect(A, pres)
    return ExtractionReport(A, max(eps, 0.0), rep.epsilon, pres)
