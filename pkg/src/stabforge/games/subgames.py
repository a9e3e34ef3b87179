"""Commutation and anticommutation games with two distinguished questions.

The commutation game asks for a joint answer to two binary observables and
checks it against either one alone. The anticommutation game is the magic
square game with two extra single-cell questions on cells (0, 0) and (1, 1),
whose observables anticommute in the standard operator solution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Game, SynchronousStrategy

__all__ = [
    "Subgame",
    "commutation_game",
    "anticommutation_game",
    "commutation_strategy",
    "anticommutation_strategy",
    "magic_square_observables",
    "SQUARE_CELLS",
]

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# question -> cell index that the single-cell question reads
SQUARE_CELLS = {"X1": (0, 0), "Z1": (1, 1)}


@dataclass(frozen=True)
class Subgame:
    """A game plus the names of its questions standing in for X and Z."""

    game: Game
    special: dict[str, str]
    private_dim: int


def _bit(a: np.ndarray, i: int) -> np.ndarray:
    return (a >> i) & 1


def commutation_game() -> Subgame:
    questions = {"X0": 2, "Z0": 2, "pair": 4}
    mu = {("pair", "X0"): 0.5, ("pair", "Z0"): 0.5}
    coord = {"X0": 0, "Z0": 1}

    def table(x, y):
        if x in coord and y == "pair":
            return table(y, x).T
        if x == "pair" and y in coord:
            return _bit(np.arange(4), coord[y])[:, None] == np.arange(2)[None, :]
        return np.ones((questions[x], questions[y]), dtype=bool)

    game = Game(questions, mu, table, name="commutation", tags={k: "commutation" for k in mu})
    return Subgame(game, {"X": "X0", "Z": "Z0"}, 1)


def _cell_bit(q: str, cell: tuple[int, int], a: np.ndarray) -> np.ndarray:
    r, c = cell
    if q[0] == "r":
        return _bit(a, c)
    if q[0] == "c":
        return _bit(a, r)
    return a


def _cells(q: str) -> list[tuple[int, int]]:
    if q in SQUARE_CELLS:
        return [SQUARE_CELLS[q]]
    i = int(q[1])
    return [(i, c) for c in range(3)] if q[0] == "r" else [(r, i) for r in range(3)]


def anticommutation_game() -> Subgame:
    lines = [f"r{i}" for i in range(3)] + [f"c{i}" for i in range(3)]
    questions = {q: 8 for q in lines}
    questions.update({q: 2 for q in SQUARE_CELLS})
    mu = {}
    for r in range(3):
        for c in range(3):
            mu[(f"r{r}", f"c{c}")] = 0.5 / 9
    for q, (r, c) in SQUARE_CELLS.items():
        mu[(q, f"r{r}")] = 0.5 / 4
        mu[(q, f"c{c}")] = 0.5 / 4
    parity = {**{f"r{i}": 0 for i in range(3)}, **{f"c{i}": 1 for i in range(3)}}

    def valid(q: str) -> np.ndarray:
        a = np.arange(questions[q])
        if q in parity:
            return (np.bitwise_count(a.astype(np.uint64)) & 1) == parity[q]
        return np.ones(2, dtype=bool)

    def table(x, y):
        shared = set(_cells(x)) & set(_cells(y))
        a = np.arange(questions[x])[:, None]
        b = np.arange(questions[y])[None, :]
        ok = valid(x)[:, None] & valid(y)[None, :]
        for cell in shared:
            ok = ok & (_cell_bit(x, cell, a) == _cell_bit(y, cell, b))
        return ok

    game = Game(questions, mu, table, name="anticommutation", tags={k: "commutation" for k in mu})
    return Subgame(game, {"X": "X1", "Z": "Z1"}, 2)


def _projector(O: np.ndarray, b: int) -> np.ndarray:
    return (np.eye(len(O)) + (-1) ** b * O) / 2


def _binary(O: np.ndarray) -> np.ndarray:
    return np.array([_projector(O, 0), _projector(O, 1)])


def _joint(observables: list[np.ndarray]) -> np.ndarray:
    """Joint PVM of commuting observables; bit i of the answer is observable i."""
    k = len(observables)
    out = []
    for a in range(1 << k):
        P = np.eye(len(observables[0]), dtype=complex)
        for i, O in enumerate(observables):
            P = P @ _projector(O, (a >> i) & 1)
        out.append(P)
    return np.array(out)


def commutation_strategy(U: np.ndarray, V: np.ndarray) -> SynchronousStrategy:
    """Perfect strategy from commuting involutions U, V (no private register)."""
    U = np.asarray(U, dtype=complex)
    V = np.asarray(V, dtype=complex)
    return SynchronousStrategy(len(U), {"X0": _binary(U), "Z0": _binary(V), "pair": _joint([U, V])})


def magic_square_observables(U: np.ndarray, V: np.ndarray) -> list[list[np.ndarray]]:
    """3 x 3 table of observables on C^d (x) C^2; rows multiply to +I and
    columns to -I when U, V are anticommuting involutions."""
    I2 = np.eye(2)
    Id = np.eye(len(U))
    iUV = 1j * U @ V
    return [
        [np.kron(U, I2), np.kron(Id, PAULI_X), np.kron(U, PAULI_X)],
        [np.kron(Id, PAULI_Z), np.kron(V, I2), np.kron(V, PAULI_Z)],
        [-np.kron(U, PAULI_Z), -np.kron(V, PAULI_X), np.kron(iUV, PAULI_Y)],
    ]


def anticommutation_strategy(U: np.ndarray, V: np.ndarray) -> SynchronousStrategy:
    """Perfect strategy on C^d (x) C^2 from anticommuting involutions U, V."""
    U = np.asarray(U, dtype=complex)
    V = np.asarray(V, dtype=complex)
    table = magic_square_observables(U, V)
    pvms = {}
    for i in range(3):
        pvms[f"r{i}"] = _joint([table[i][c] for c in range(3)])
        pvms[f"c{i}"] = _joint([table[r][i] for r in range(3)])
    for q, (r, c) in SQUARE_CELLS.items():
        pvms[q] = _binary(table[r][c])
    return SynchronousStrategy(2 * len(U), pvms)
