"""Named game and strategy constructors, so large objects serialize as a recipe."""

from __future__ import annotations

import functools

import numpy as np

from ..codes import brm_tester, hadamard_code
from .braiding import (
    braiding_test,
    dls_game,
    perfect_braiding_strategy,
    perfect_dls_strategy,
    perfect_qld_strategy,
    qld_test,
)
from .code_game import code_game, perfect_code_strategy
from .core import Game, SynchronousStrategy
from .subgames import anticommutation_game, anticommutation_strategy, commutation_game, commutation_strategy

__all__ = ["GAME_KINDS", "build_game", "build_perfect_strategy", "binary_code", "GAME_REGISTRY", "strategy_registry"]

GAME_KINDS = ("code", "braiding", "qld", "dls", "commutation", "anticommutation")


def binary_code(family: str, t: int, m: int = 1, d: int = 1):
    """(code, tester) for a binary family: hadamard(t) or brm(t, m, d)."""
    if family == "hadamard":
        return hadamard_code(t)
    if family == "brm":
        return brm_tester(t, m, d)
    raise ValueError(f"unknown binary code family {family!r}")


def _code_params(params: dict) -> dict:
    family = params.get("code", "hadamard")
    out = {"code": family, "t": int(params["t"])}
    if family == "brm":
        out.update(m=int(params.get("m", 1)), d=int(params.get("d", 1)))
    return out


def build_game(kind: str, **params) -> Game:
    if kind == "code":
        p = _code_params(params)
        code, tester = binary_code(p["code"], p["t"], p.get("m", 1), p.get("d", 1))
        game = code_game(code, tester, drop_zero_rows=p["code"] == "brm")
        game.builtin = {"kind": kind, "params": p}
    elif kind == "braiding":
        p = _code_params(params)
        code, tester = binary_code(p["code"], p["t"], p.get("m", 1), p.get("d", 1))
        game = braiding_test(code, tester, drop_zero_rows=p["code"] == "brm")
        game.builtin = {"kind": kind, "params": p}
    elif kind == "qld":
        game = qld_test(int(params["t"]), int(params["m"]), int(params["d"]))
    elif kind == "dls":
        if "E" in params:
            E = np.asarray(params["E"], dtype=np.int64)
        else:
            p = _code_params(params)
            E = binary_code(p["code"], p["t"], p.get("m", 1), p.get("d", 1))[0].generator
        game = dls_game(E)
    elif kind == "commutation":
        game = commutation_game().game
        game.builtin = {"kind": kind, "params": {}}
    elif kind == "anticommutation":
        game = anticommutation_game().game
        game.builtin = {"kind": kind, "params": {}}
    else:
        raise ValueError(f"unknown game kind {kind!r}; expected one of {GAME_KINDS}")
    return game


GAME_REGISTRY = {kind: functools.partial(build_game, kind) for kind in GAME_KINDS}


def build_perfect_strategy(game: Game) -> SynchronousStrategy:
    """The reference perfect strategy of a registered game."""
    if game.builtin is None:
        raise ValueError("only registered games have a reference strategy")
    kind = game.builtin["kind"]
    # rebuild from the recipe: a game loaded from tables lacks the code data
    game = build_game(kind, **game.builtin["params"])
    if kind == "code":
        p = game.builtin["params"]
        code, _ = binary_code(p["code"], p["t"], p.get("m", 1), p.get("d", 1))
        strat = perfect_code_strategy(game, code)
    elif kind == "braiding":
        strat = perfect_braiding_strategy(game)
    elif kind == "qld":
        strat = perfect_qld_strategy(game)
    elif kind == "dls":
        strat = perfect_dls_strategy(game)
    else:
        X = np.array([[0, 1], [1, 0]])
        Z = np.diag([1, -1])
        if kind == "commutation":
            strat = commutation_strategy(np.kron(X, np.eye(2)), np.kron(np.eye(2), Z))
        else:
            strat = anticommutation_strategy(X, Z)
    strat.builtin = {"kind": "perfect", "game": game.builtin}
    return strat


def strategy_registry(spec: dict) -> SynchronousStrategy:
    if spec.get("kind") != "perfect":
        raise ValueError(f"unknown builtin strategy {spec!r}")
    g = spec["game"]
    return build_perfect_strategy(build_game(g["kind"], **g["params"]))
