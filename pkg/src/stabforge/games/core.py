"""Synchronous games, strategies and their value.

A question id is any hashable tuple. The predicate is a function returning
the boolean table D[a, b] for an ordered question pair; games built from a
fixed table wrap it the same way.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping

import numpy as np

from ..operators import TOL, matrix_from_json, matrix_to_json

__all__ = [
    "Game",
    "SynchronousStrategy",
    "ValueReport",
    "StrategyValidationError",
    "game_value",
    "classical_value",
    "deterministic_strategy",
    "qid_to_str",
    "qid_from_str",
    "TABLE_BUDGET",
]

TABLE_BUDGET = 1 << 20

QuestionId = Hashable
PairTable = Callable[[QuestionId, QuestionId], np.ndarray]


def qid_to_str(q: QuestionId) -> str:
    return json.dumps(list(q) if isinstance(q, tuple) else q, separators=(",", ":"))


def _tuplify(v):
    return tuple(_tuplify(x) for x in v) if isinstance(v, list) else v


def qid_from_str(s: str) -> QuestionId:
    return _tuplify(json.loads(s))


class Game:
    """Questions with alphabet sizes, a sparse distribution on ordered pairs,
    and a predicate given as a pair-table function."""

    def __init__(
        self,
        questions: Mapping[QuestionId, int],
        mu: Mapping[tuple[QuestionId, QuestionId], float],
        pair_table: PairTable,
        name: str = "",
        tags: Mapping[tuple[QuestionId, QuestionId], str] | None = None,
        builtin: dict | None = None,
    ):
        self.questions = dict(questions)
        self.mu = {pair: float(w) for pair, w in mu.items() if w > 0}
        self._pair_table = pair_table
        self._cache: dict[tuple, np.ndarray] = {}
        self.name = name
        self.tags = dict(tags) if tags else {}
        self.builtin = builtin
        total = sum(self.mu.values())
        if abs(total - 1) > 1e-12:
            raise ValueError(f"mu sums to {total}, not 1")
        for x, y in self.mu:
            if x not in self.questions or y not in self.questions:
                raise ValueError(f"pair {(x, y)} uses an unknown question")

    def __repr__(self) -> str:
        return f"Game({self.name!r}, questions={len(self.questions)}, pairs={len(self.mu)})"

    def table(self, x: QuestionId, y: QuestionId) -> np.ndarray:
        key = (x, y)
        if key not in self._cache:
            t = np.asarray(self._pair_table(x, y), dtype=bool)
            if t.shape != (self.questions[x], self.questions[y]):
                raise ValueError(f"predicate table for {key} has shape {t.shape}")
            self._cache[key] = t
        return self._cache[key]

    def predicate(self, x: QuestionId, y: QuestionId, a: int, b: int) -> bool:
        return bool(self.table(x, y)[a, b])

    def check_symmetric(self) -> None:
        for x, y in self.mu:
            if not np.array_equal(self.table(x, y), self.table(y, x).T):
                raise AssertionError(f"predicate is not symmetric on {(x, y)}")

    def marginal(self) -> dict[QuestionId, float]:
        """mu(x) = sum_y (mu(x, y) + mu(y, x)) / 2."""
        out: dict[QuestionId, float] = {}
        for (x, y), w in self.mu.items():
            out[x] = out.get(x, 0.0) + w / 2
            out[y] = out.get(y, 0.0) + w / 2
        return out

    def table_size(self) -> int:
        return sum(self.questions[x] * self.questions[y] for x, y in self.mu)

    def to_json(self) -> dict:
        order = list(self.questions)
        index = {q: i for i, q in enumerate(order)}
        out = {
            "name": self.name,
            "questions": [{"id": list(q) if isinstance(q, tuple) else q, "alphabet": self.questions[q]} for q in order],
            "mu": [[index[x], index[y], w] for (x, y), w in self.mu.items()],
            "tags": [[index[x], index[y], t] for (x, y), t in self.tags.items()],
            "recipe": self.builtin,
        }
        if self.table_size() <= TABLE_BUDGET or self.builtin is None:
            tables = []
            for x, y in self.mu:
                tables.append([index[x], index[y], self.table(x, y).astype(int).tolist()])
                if (y, x) not in self.mu:
                    tables.append([index[y], index[x], self.table(y, x).astype(int).tolist()])
            out["predicate"] = {"tables": tables}
        else:
            out["predicate"] = {"builtin": self.builtin}
        return out

    @classmethod
    def from_json(cls, data: Mapping, registry: Mapping[str, Callable[..., "Game"]] | None = None) -> "Game":
        pred = data["predicate"]
        if "builtin" in pred:
            if registry is None or pred["builtin"]["kind"] not in registry:
                raise ValueError(f"unknown builtin predicate {pred['builtin']!r}")
            return registry[pred["builtin"]["kind"]](**pred["builtin"]["params"])
        order = [_tuplify(q["id"]) for q in data["questions"]]
        questions = {q: int(spec["alphabet"]) for q, spec in zip(order, data["questions"])}
        mu = {(order[i], order[j]): float(w) for i, j, w in data["mu"]}
        tags = {(order[i], order[j]): t for i, j, t in data.get("tags", [])}
        tables = {(order[i], order[j]): np.array(tb, dtype=bool) for i, j, tb in pred["tables"]}

        def lookup(x, y):
            if (x, y) not in tables:
                raise KeyError(f"no predicate table for {(x, y)}")
            return tables[(x, y)]

        return cls(questions, mu, lookup, data.get("name", ""), tags, builtin=data.get("recipe"))


class StrategyValidationError(ValueError):
    def __init__(self, invariant: str, question=None, detail: str = ""):
        self.invariant = invariant
        self.question = question
        super().__init__(f"{invariant} violated" + (f" at question {question!r}" if question is not None else "") + (f": {detail}" if detail else ""))

    def to_json(self) -> dict:
        return {
            "error": "validation",
            "invariant": self.invariant,
            "question": qid_to_str(self.question) if self.question is not None else None,
            "message": str(self),
        }


class SynchronousStrategy:
    """One projective measurement per question, all on the same space C^d."""

    def __init__(self, dim: int, pvms: Mapping[QuestionId, np.ndarray], builtin: dict | None = None):
        self.dim = dim
        self.pvms = pvms
        self.builtin = builtin

    def __getitem__(self, q: QuestionId) -> np.ndarray:
        return self.pvms[q]

    def __contains__(self, q: QuestionId) -> bool:
        return q in self.pvms

    def observable(self, q: QuestionId) -> np.ndarray:
        """P_0 - P_1 for a binary question."""
        P = self.pvms[q]
        if len(P) != 2:
            raise ValueError("observables are defined for binary questions")
        return P[0] - P[1]

    def validate(self, game: Game | None = None, tol: float = TOL) -> None:
        needed: Iterable = self.pvms.keys()
        if game is not None:
            # ordered, so lazily built measurements are visited in game order
            needed = dict.fromkeys(q for pair in game.mu for q in pair)
        I = np.eye(self.dim)
        checked: set[int] = set()
        for q in needed:
            if q not in self.pvms:
                raise StrategyValidationError("coverage", q, "no measurement for this question")
            P = self.pvms[q]
            if game is not None and len(P) != game.questions[q]:
                raise StrategyValidationError("alphabet", q, f"{len(P)} outcomes, game expects {game.questions[q]}")
            if P.shape[1:] != (self.dim, self.dim):
                raise StrategyValidationError("dimension", q)
            if id(P) in checked:
                continue
            checked.add(id(P))
            # Frobenius norms bound the operator norm from above
            if np.linalg.norm(P - np.conj(np.swapaxes(P, 1, 2))) > tol:
                raise StrategyValidationError("hermitian", q)
            if np.linalg.norm(P @ P - P) > tol:
                raise StrategyValidationError("projective", q)
            if np.linalg.norm(P.sum(axis=0) - I) > tol:
                raise StrategyValidationError("completeness", q)

    def to_json(self, budget: int = TABLE_BUDGET) -> dict:
        if self.builtin is not None and len(self.pvms) * self.dim**2 > budget:
            return {"d": self.dim, "builtin": self.builtin}
        return {"d": self.dim, "pvms": {qid_to_str(q): [matrix_to_json(M) for M in P] for q, P in self.pvms.items()}}

    @classmethod
    def from_json(cls, data: Mapping, registry: Callable[[dict], "SynchronousStrategy"] | None = None) -> "SynchronousStrategy":
        d = int(data["d"])
        if "builtin" in data:
            if registry is None:
                raise ValueError("builtin strategy given but no registry to rebuild it")
            strat = registry(data["builtin"])
            if strat.dim != d:
                raise StrategyValidationError("dimension", None, f"builtin has d={strat.dim}, file says {d}")
            return strat
        pvms = {}
        for key, mats in data["pvms"].items():
            arr = np.array([matrix_from_json(m) for m in mats])
            if arr.ndim != 3 or arr.shape[1:] != (d, d):
                raise StrategyValidationError("dimension", qid_from_str(key))
            pvms[qid_from_str(key)] = arr
        return cls(d, pvms)


@dataclass(frozen=True)
class ValueReport:
    omega: float
    by_tag: dict[str, dict[str, float]] = field(default_factory=dict)
    pair_count: int = 0

    def to_json(self) -> dict:
        return {"omega": self.omega, "by_tag": self.by_tag, "pair_count": self.pair_count}


def _pair_score(table: np.ndarray, Px: np.ndarray, Py: np.ndarray, d: int) -> float:
    # gram[a, b] = tau(P^x_a P^y_b)
    gram = np.einsum("aij,bji->ab", Px, Py).real / d
    return float(gram[table].sum())


def game_value(game: Game, strategy: SynchronousStrategy, validate: bool = True) -> ValueReport:
    """sum_{x,y} (mu(x,y) + mu(y,x))/2 sum_{a,b} D(x,y,a,b) tau(P^x_a P^y_b)."""
    if validate:
        strategy.validate(game)
    d = strategy.dim
    total = 0.0
    mass: dict[str, float] = {}
    won: dict[str, float] = {}
    for (x, y), w in game.mu.items():
        Px, Py = strategy[x], strategy[y]
        forward = _pair_score(game.table(x, y), Px, Py, d)
        backward = _pair_score(game.table(y, x), Py, Px, d)
        score = w * (forward + backward) / 2
        total += score
        tag = game.tags.get((x, y))
        if tag is not None:
            mass[tag] = mass.get(tag, 0.0) + w
            won[tag] = won.get(tag, 0.0) + score
    by_tag = {t: {"mass": mass[t], "value": won[t] / mass[t]} for t in sorted(mass)}
    return ValueReport(total, by_tag, len(game.mu))


def deterministic_strategy(game: Game, answers: Mapping[QuestionId, int]) -> SynchronousStrategy:
    """The one-dimensional strategy answering each question with a fixed letter."""
    pvms = {}
    for q, size in game.questions.items():
        P = np.zeros((size, 1, 1))
        P[answers[q], 0, 0] = 1.0
        pvms[q] = P
    return SynchronousStrategy(1, pvms)


def classical_value(game: Game, budget: int = 1 << 22) -> tuple[float, dict]:
    """Best deterministic strategy, by enumerating every answer assignment of
    the questions that appear in supp(mu)."""
    used = sorted({q for pair in game.mu for q in pair}, key=repr)
    sizes = [game.questions[q] for q in used]
    count = int(np.prod(sizes, dtype=object))
    if count > budget:
        raise ValueError(f"{count} deterministic strategies exceed the budget {budget}")
    idx = np.arange(count, dtype=np.int64)
    strides = np.cumprod([1] + sizes[:-1]).astype(np.int64)
    pos = {q: i for i, q in enumerate(used)}

    def answer(q):
        i = pos[q]
        return (idx // strides[i]) % sizes[i]

    score = np.zeros(count)
    for (x, y), w in game.mu.items():
        ax, ay = answer(x), answer(y)
        score += w * (game.table(x, y)[ax, ay].astype(float) + game.table(y, x)[ay, ax]) / 2
    best = int(np.argmax(score))
    assignment = {q: int((best // strides[i]) % sizes[i]) for q, i in pos.items()}
    return float(score[best]), assignment


def all_accepting(questions: Mapping[QuestionId, int]) -> PairTable:
    return lambda x, y: np.ones((questions[x], questions[y]), dtype=bool)
