"""Composite games that certify Pauli observables.

braiding_test and qld_test glue a code test per basis W in {X, Z} to one
(anti)commutation subgame per pair of columns, with a consistency test tying
the subgame's special questions to the variable questions. dls_game checks
the same relations on the observables sigma^W(a) of a single k-bit question.

Perfect strategies act on C^(2^k) (x) C^2, the second factor being the
private qubit used by the magic square. Their measurements are built on
demand, since a full table can run to hundreds of megabytes.
"""

from __future__ import annotations

import functools
from collections.abc import Mapping
from typing import Callable, Iterator

import numpy as np

from ..codes import LinearCode, LocalTester, brm_tester
from ..fields import BitMatrix, gf2_rank
from ..pauli import MAX_QUBITS, PauliLabel, pauli_observable, pauli_pvm
from ..presentations import z2k_eff_presentation
from .code_game import code_game
from .core import Game, SynchronousStrategy
from .subgames import (
    Subgame,
    _binary,
    _joint,
    anticommutation_game,
    anticommutation_strategy,
    commutation_game,
    commutation_strategy,
)

__all__ = [
    "braiding_test",
    "perfect_braiding_strategy",
    "qld_test",
    "perfect_qld_strategy",
    "dls_game",
    "perfect_dls_strategy",
    "LazyMeasurements",
    "MAX_STRATEGY_QUBITS",
    "MAX_QLD_QUBITS",
]

MAX_STRATEGY_QUBITS = 8
MAX_QLD_QUBITS = 8
BASES = ("X", "Z")


class LazyMeasurements(Mapping):
    """Read-only question -> PVM mapping whose values are built on access."""

    def __init__(self, keys, factory: Callable, cache_size: int = 512):
        self._keys = list(keys)
        self._key_set = set(self._keys)
        self._factory = functools.lru_cache(maxsize=cache_size)(factory)

    def __getitem__(self, q):
        if q not in self._key_set:
            raise KeyError(q)
        return self._factory(q)

    def __contains__(self, q) -> bool:
        return q in self._key_set

    def __iter__(self) -> Iterator:
        return iter(self._keys)

    def __len__(self) -> int:
        return len(self._keys)


class _Builder:
    """Accumulates weighted question pairs, each with its own table source."""

    def __init__(self):
        self.questions: dict = {}
        self.mu: dict = {}
        self.tags: dict = {}
        self.sources: dict = {}

    def question(self, q, alphabet: int) -> None:
        if self.questions.setdefault(q, alphabet) != alphabet:
            raise ValueError(f"question {q!r} declared with two alphabets")

    def pair(self, x, y, weight: float, tag: str, source: Callable[[], np.ndarray]) -> None:
        if weight <= 0:
            return
        self.mu[(x, y)] = self.mu.get((x, y), 0.0) + weight
        self.tags.setdefault((x, y), tag)
        self.sources.setdefault((x, y), source)

    def build(self, name: str, cls=Game) -> Game:
        sources = self.sources

        def table(x, y):
            if (x, y) in sources:
                return sources[(x, y)]()
            return sources[(y, x)]().T

        # absorb float drift so the total is exactly representable as 1
        total = sum(self.mu.values())
        mu = {k: v / total for k, v in self.mu.items()}
        return cls(self.questions, mu, table, name=name, tags=self.tags)


def _columns(code: LinearCode) -> list[int]:
    E = np.asarray(code.generator) & 1
    return [int(sum(int(E[r, i]) << r for r in range(E.shape[0]))) for i in range(E.shape[1])]


def _gamma(a: int, b: int) -> int:
    return bin(a & b).count("1") & 1


def _subgames() -> tuple[Subgame, Subgame]:
    return commutation_game(), anticommutation_game()


def _add_code_test(b: _Builder, code: LinearCode, tester: LocalTester, weight: float, drop_zero_rows: bool):
    inner = code_game(code, tester, drop_zero_rows=drop_zero_rows)
    for q, size in inner.questions.items():
        for W in BASES:
            b.question((W, *q), size)
    for (x, y), w in inner.mu.items():
        for W in BASES:
            b.pair((W, *x), (W, *y), weight * w / 2, "code", functools.partial(inner.table, x, y))
    return inner


def _sub_id(kind: str, key: tuple, name: str) -> tuple:
    return (kind, *key, name)


def _add_subgame(b: _Builder, sub: Subgame, kind: str, key: tuple, weight: float, replace: Mapping | None = None) -> None:
    """Embed a subgame under the given key; questions listed in replace are
    sent as the mapped outer question instead."""
    replace = replace or {}
    g = sub.game
    for name, size in g.questions.items():
        if name not in replace:
            b.question(_sub_id(kind, key, name), size)

    def outer(name):
        return replace.get(name, _sub_id(kind, key, name))

    for (x, y), w in g.mu.items():
        b.pair(outer(x), outer(y), weight * w, "commutation", functools.partial(g.table, x, y))


def _equality() -> np.ndarray:
    return np.eye(2, dtype=bool)


def _composite(
    code: LinearCode,
    tester: LocalTester,
    with_pairwise: bool,
    check_columns: bool,
    drop_zero_rows: bool,
    pairs: list[tuple[tuple[int, int], float]] | None = None,
) -> Game:
    cols = _columns(code)
    n = code.n
    if check_columns and len(set(cols)) != n:
        raise ValueError("the generator matrix has repeated columns")
    cc, ac = _subgames()
    share = 0.25 if with_pairwise else 1 / 3
    b = _Builder()
    inner = _add_code_test(b, code, tester, share, drop_zero_rows)
    for i in range(n):
        for W in BASES:
            b.question((W, "var", i), 2)
    per = 1.0 / (n * n)
    for iX in range(n):
        for iZ in range(n):
            sub, kind = (ac, "ac") if _gamma(cols[iX], cols[iZ]) else (cc, "cc")
            _add_subgame(b, sub, kind, (iX, iZ), share * per)
            for W, i in (("X", iX), ("Z", iZ)):
                b.pair((W, "var", i), _sub_id(kind, (iX, iZ), sub.special[W]), share * per / 2, "consistency", _equality)
    if with_pairwise:
        for (i, ip), w in pairs:
            for W in BASES:
                q = ("pc", W, i, ip, "pair")
                b.question(q, 4)
                for bit, var in ((0, i), (1, ip)):
                    b.pair(q, (W, "var", var), share * w / 4, "pairwise-commutation", functools.partial(_pc_table, i == ip, bit))
    name = "qld-test" if with_pairwise else "braiding-test"
    game = b.build(f"{name}({code.name})")
    game.code = code
    game.columns = cols
    game.supports = inner.supports
    return game


def _pc_table(same: bool, bit: int) -> np.ndarray:
    a = np.arange(4)[:, None]
    b = np.arange(2)[None, :]
    if same:
        return (((a >> 0) & 1) == b) & (((a >> 1) & 1) == b)
    return ((a >> bit) & 1) == b


def braiding_test(code: LinearCode, tester: LocalTester, drop_zero_rows: bool = False) -> Game:
    """Code test, (anti)commutation test and consistency test, a third each."""
    if code.q != 2:
        raise ValueError("the braiding test needs a binary code")
    return _composite(code, tester, False, True, drop_zero_rows)


def _commutation_pairs(t: int, m: int, d: int) -> list[tuple[tuple[int, int], float]]:
    pres = z2k_eff_presentation(t, m, d)
    out: dict[tuple[int, int], float] = {}
    for rel in pres.relations:
        if rel.tag != "commutation" or rel.weight <= 0:
            continue
        gens = []
        for g, _ in rel.word:
            if g not in gens:
                gens.append(g)
        i, ip = (gens[0], gens[-1])
        out[(i, ip)] = out.get((i, ip), 0.0) + rel.weight
    total = sum(out.values())
    return [(p, w / total) for p, w in out.items()]


def qld_test(t: int, m: int, d: int) -> Game:
    """Braiding test over the binary Reed-Muller code plus a pairwise
    commutation test, each of the four tests with probability 1/4."""
    code, tester = brm_tester(t, m, d)
    if code.k > MAX_QLD_QUBITS:
        raise ValueError(f"k = {code.k} exceeds the budget of {MAX_QLD_QUBITS} qubits")
    # zero columns of the code make repeated columns unavoidable
    game = _composite(code, tester, True, False, True, _commutation_pairs(t, m, d))
    game.builtin = {"kind": "qld", "params": {"t": t, "m": m, "d": d}}
    return game


def _check_qubits(k: int) -> None:
    if k > MAX_STRATEGY_QUBITS:
        raise ValueError(f"k = {k} exceeds the strategy budget of {MAX_STRATEGY_QUBITS} qubits")


@functools.lru_cache(maxsize=4096)
def _pauli(W: str, a: int, k: int) -> np.ndarray:
    return pauli_observable(PauliLabel(W, a, k)).astype(complex)


def _with_private(O: np.ndarray) -> np.ndarray:
    return np.kron(O, np.eye(2))


@functools.lru_cache(maxsize=256)
def _subgame_strategy(kind: str, a: int, b: int, k: int) -> SynchronousStrategy:
    U, V = _pauli("X", a, k), _pauli("Z", b, k)
    if kind == "cc":
        return commutation_strategy(_with_private(U), _with_private(V))
    return anticommutation_strategy(U, V)


def _pauli_factory(k: int, cols: list[int], supports) -> Callable:
    @functools.lru_cache(maxsize=4096)
    def var(W: str, a: int) -> np.ndarray:
        return _with_private(_pauli(W, a, k))

    def factory(q):
        head = q[0]
        if head in BASES and q[1] == "var":
            return _binary(var(head, cols[q[2]]))
        if head in BASES and q[1] == "eq":
            return _joint([var(head, cols[i]) for i in supports[q[2]]])
        if head in ("cc", "ac"):
            _, iX, iZ, name = q
            return _subgame_strategy(head, cols[iX], cols[iZ], k)[name]
        if head == "pc":
            _, W, i, ip, _ = q
            return _joint([var(W, cols[i]), var(W, cols[ip])])
        raise KeyError(q)

    return factory


def _composite_strategy(game: Game) -> SynchronousStrategy:
    code = game.code
    k = code.k
    _check_qubits(k)
    factory = _pauli_factory(k, game.columns, game.supports)
    strat = SynchronousStrategy(2 << k, LazyMeasurements(game.questions, factory))
    strat.pauli_dim = 1 << k
    return strat


def perfect_braiding_strategy(game: Game) -> SynchronousStrategy:
    """P^(W,var,i)_b = (I + (-1)^b sigma^W(E e_i)) / 2 on the Pauli register,
    rows as products along their support, subgames from the reference
    strategies with U = sigma^X(E e_iX), V = sigma^Z(E e_iZ)."""
    return _composite_strategy(game)


def perfect_qld_strategy(game: Game) -> SynchronousStrategy:
    return _composite_strategy(game)


def _as_bitmatrix(E) -> BitMatrix:
    if isinstance(E, BitMatrix):
        return E
    return BitMatrix.from_array(np.asarray(E, dtype=np.int64) & 1)


def dls_game(E) -> Game:
    """Sample omega uniformly from S_X x S_Z (columns of E). With probability
    1/2 play the commutation game (gamma = 0) or anticommutation game
    (gamma = 1) with its special questions replaced by (W, omega_W); with
    probability 1/2 ask W and (W, omega_W) and check a . omega_W = b."""
    M = _as_bitmatrix(E)
    k, n = M.nrows, M.ncols
    if k > MAX_QUBITS:
        raise ValueError(f"k = {k} exceeds {MAX_QUBITS}")
    if gf2_rank(M) != k:
        raise ValueError("E is rank deficient")
    arr = M.to_array()
    cols = sorted({int(sum(int(arr[r, i]) << r for r in range(k))) for i in range(n)})
    cc, ac = _subgames()
    b = _Builder()
    for W in BASES:
        b.question((W,), 1 << k)
        for a in cols:
            b.question((W, a), 2)
    per = 1.0 / len(cols) ** 2
    for wx in cols:
        for wz in cols:
            sub, kind = (ac, "ac") if _gamma(wx, wz) else (cc, "cc")
            replace = {sub.special["X"]: ("X", wx), sub.special["Z"]: ("Z", wz)}
            _add_subgame(b, sub, kind, (wx, wz), 0.5 * per, replace)
            for W, a in (("X", wx), ("Z", wz)):
                b.pair((W,), (W, a), 0.25 * per, "consistency", functools.partial(_inner_product_table, k, a))
    game = b.build(f"dls(k={k},n={n})")
    game.k = k
    game.columns = cols
    game.builtin = {"kind": "dls", "params": {"E": arr.tolist()}}
    return game


def _inner_product_table(k: int, omega: int) -> np.ndarray:
    a = np.arange(1 << k, dtype=np.uint64)
    parity = np.bitwise_count(a & np.uint64(omega)) & 1
    return parity[:, None] == np.arange(2)[None, :]


def perfect_dls_strategy(game: Game) -> SynchronousStrategy:
    """P^W = Pauli-basis PVM with hat P^W(b) = sigma^W(b); (W, a) measures sigma^W(a)."""
    k = game.k
    _check_qubits(k)

    def factory(q):
        if len(q) == 1:
            return np.array([_with_private(P) for P in pauli_pvm(q[0], k)], dtype=complex)
        if q[0] in BASES:
            return _binary(_with_private(_pauli(q[0], q[1], k)))
        kind, wx, wz, name = q
        return _subgame_strategy(kind, wx, wz, k)[name]

    strat = SynchronousStrategy(2 << k, LazyMeasurements(game.questions, factory))
    strat.pauli_dim = 1 << k
    return strat
