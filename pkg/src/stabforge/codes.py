"""Linear codes over F_{2^t}, local linear testers, distance and soundness.

Positions of a Reed-Muller code are points u of F_q^m, indexed by
sum_j u_j q^j. Positions of a code composed with the Hadamard code are pairs
(i, x) with x in F_2^t, indexed by i*q + x.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Sequence

import numpy as np

from .fields import FieldSpec, find_self_dual_basis, gf2_rank

__all__ = [
    "LinearCode",
    "LocalTester",
    "SoundnessReport",
    "hadamard_code",
    "reed_muller_code",
    "interpolation_coeffs",
    "interpolation_nodes",
    "rm_tester",
    "compose_with_hadamard",
    "composed_code",
    "brm_tester",
    "code_distance",
    "tester_soundness",
    "field_rank",
    "evaluate_polynomial",
    "DEFAULT_SOUNDNESS_BUDGET",
    "CODE_FAMILIES",
    "build_code_family",
]

DEFAULT_SOUNDNESS_BUDGET = 1 << 24
DISTANCE_BUDGET = 1 << 22

Row = tuple[tuple[int, int], ...]


def field_rank(spec: FieldSpec, matrix: np.ndarray) -> int:
    """Rank of a matrix over F_q by Gaussian elimination."""
    A = np.array(matrix, dtype=np.int64, copy=True)
    if A.size == 0:
        return 0
    if spec.t == 1:
        return gf2_rank(A)
    rows, cols = A.shape
    rank = 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if A[r, c]), None)
        if piv is None:
            continue
        A[[rank, piv]] = A[[piv, rank]]
        A[rank] = spec.mul_array(A[rank], spec.inv(int(A[rank, c])))
        for r in range(rows):
            if r != rank and A[r, c]:
                A[r] ^= spec.mul_array(A[rank], int(A[r, c]))
        rank += 1
        if rank == rows:
            break
    return rank


@dataclass(frozen=True, eq=False)
class LinearCode:
    field: FieldSpec
    generator: np.ndarray  # k x n, field elements as ints
    parity_check: np.ndarray  # m x n
    name: str = ""

    @property
    def n(self) -> int:
        return int(self.generator.shape[1])

    @property
    def k(self) -> int:
        return int(self.generator.shape[0])

    @property
    def q(self) -> int:
        return self.field.q

    def encode(self, messages: np.ndarray) -> np.ndarray:
        """Encode a batch of messages (shape (..., k)) into codewords (..., n)."""
        msgs = np.asarray(messages, dtype=np.int64)
        out = np.zeros(msgs.shape[:-1] + (self.n,), dtype=np.int64)
        for i in range(self.k):
            out ^= self.field.mul_array(
                np.broadcast_to(msgs[..., i, None], out.shape), np.broadcast_to(self.generator[i], out.shape)
            )
        return out

    def codewords(self, budget: int = DISTANCE_BUDGET) -> np.ndarray:
        count = self.q ** self.k
        if count > budget:
            raise ValueError(f"{count} codewords exceed the enumeration budget {budget}")
        msgs = np.array(list(itertools.product(range(self.q), repeat=self.k)), dtype=np.int64).reshape(count, self.k)
        return self.encode(msgs)

    def syndrome(self, word: np.ndarray) -> np.ndarray:
        word = np.asarray(word, dtype=np.int64)
        prods = self.field.mul_array(self.parity_check, np.broadcast_to(word, self.parity_check.shape))
        return np.bitwise_xor.reduce(prods, axis=1) if prods.size else np.zeros(0, dtype=np.int64)

    def contains(self, word: np.ndarray) -> bool:
        return not np.any(self.syndrome(word))

    @cached_property
    def distance(self) -> int:
        return code_distance(self)

    def check_invariants(self) -> None:
        spec = self.field
        if self.parity_check.size and self.k:
            for row in self.generator:
                if np.any(self.syndrome(row)):
                    raise AssertionError("generator row fails a parity check")
        if field_rank(spec, self.generator) != self.k:
            raise AssertionError("generator matrix is rank deficient")
        if field_rank(spec, self.parity_check) != self.n - self.k:
            raise AssertionError("parity check rank is not n - k")

    def to_json(self) -> dict:
        return {
            "field": self.field.to_json(),
            "n": self.n,
            "k": self.k,
            "E": self.generator.tolist(),
            "h": self.parity_check.tolist(),
            "name": self.name,
        }

    @classmethod
    def from_json(cls, data: dict) -> "LinearCode":
        spec = FieldSpec.from_json(data["field"])
        n = int(data["n"])
        E = np.array(data["E"], dtype=np.int64).reshape(-1, n)
        h = np.array(data["h"], dtype=np.int64).reshape(-1, n)
        if E.shape[0] != int(data["k"]):
            raise ValueError("k does not match the generator matrix")
        return cls(spec, E, h, data.get("name", ""))


@dataclass(frozen=True, eq=False)
class LocalTester:
    code: LinearCode
    rows: tuple[Row, ...]
    weights: tuple[Fraction, ...]
    labels: tuple = field(default=(), repr=False)

    def __post_init__(self) -> None:
        if len(self.weights) != len(self.rows):
            raise ValueError("one weight per row is required")
        if any(w < 0 for w in self.weights):
            raise ValueError("negative row weight")
        if sum(self.weights) != 1:
            raise ValueError("row weights must sum to 1")
        n = self.code.n
        for row in self.rows:
            for col, coeff in row:
                if not 0 <= col < n or not 0 < coeff < self.code.q:
                    raise ValueError(f"bad row entry {(col, coeff)}")

    @property
    def locality(self) -> int:
        return max((len(r) for r in self.rows), default=0)

    @property
    def nu(self) -> np.ndarray:
        return np.array([float(w) for w in self.weights])

    def __len__(self) -> int:
        return len(self.rows)

    def dense(self) -> np.ndarray:
        out = np.zeros((len(self.rows), self.code.n), dtype=np.int64)
        for i, row in enumerate(self.rows):
            for col, coeff in row:
                out[i, col] = coeff
        return out

    def nonzero_rows(self) -> list[int]:
        return [i for i, r in enumerate(self.rows) if r]

    def to_json(self) -> dict:
        return {
            "rows": [[[c, v] for c, v in row] for row in self.rows],
            "nu": [str(w) for w in self.weights],
        }

    @classmethod
    def from_json(cls, data: dict, code: LinearCode) -> "LocalTester":
        rows = tuple(tuple((int(c), int(v)) for c, v in row) for row in data["rows"])
        return cls(code, rows, tuple(Fraction(w) for w in data["nu"]))


def _cancel(entries: Sequence[tuple[int, int]]) -> Row:
    """Sum coefficients per column in characteristic 2 and drop zeros."""
    acc: dict[int, int] = {}
    for col, coeff in entries:
        acc[col] = acc.get(col, 0) ^ coeff
    return tuple(sorted((c, v) for c, v in acc.items() if v))


def _uniform(count: int) -> tuple[Fraction, ...]:
    return (Fraction(1, count),) * count


def hadamard_code(t: int) -> tuple[LinearCode, LocalTester]:
    """Binary Hadamard code of length 2^t with the three-query linearity tester."""
    if t < 1:
        raise ValueError("t must be at least 1")
    T = 1 << t
    xs = np.arange(T)
    E = np.array([(xs >> i) & 1 for i in range(t)], dtype=np.int64)
    rows, labels = [], []
    for x in range(T):
        for y in range(T):
            rows.append(_cancel([(x, 1), (y, 1), (x ^ y, 1)]))
            labels.append((x, y))
    F2 = find_self_dual_basis(1)
    dense = np.zeros((len(rows), T), dtype=np.int64)
    for i, r in enumerate(rows):
        for c, v in r:
            dense[i, c] = v
    code = LinearCode(F2, E, dense, name=f"hadamard(t={t})")
    return code, LocalTester(code, tuple(rows), _uniform(len(rows)), tuple(labels))


def _points(q: int, m: int) -> np.ndarray:
    """All points of F_q^m, row p holding the coordinates of position p."""
    idx = np.arange(q**m)
    return np.array([(idx // q**j) % q for j in range(m)], dtype=np.int64).T.reshape(q**m, m)


def interpolation_nodes(spec: FieldSpec, d: int) -> list[int]:
    return list(range(d + 1))


def interpolation_coeffs(spec: FieldSpec, u: int, v: int, nodes: Sequence[int]) -> list[int]:
    """Lagrange weights a_i with f(v) = sum_i a_i f(u + t_i) for deg f <= len(nodes) - 1."""
    if len(set(nodes)) != len(nodes):
        raise ValueError("interpolation nodes must be distinct")
    out = []
    for i, ti in enumerate(nodes):
        num, den = 1, 1
        for j, tj in enumerate(nodes):
            if j == i:
                continue
            num = spec.mul(num, v ^ u ^ tj)
            den = spec.mul(den, ti ^ tj)
        out.append(spec.div(num, den))
    return out


def _rm_rows(spec: FieldSpec, m: int, d: int) -> tuple[list[Row], list[tuple]]:
    q = spec.q
    nodes = interpolation_nodes(spec, d)
    pts = _points(q, m)
    powers = q ** np.arange(m)
    rows, labels = [], []
    for u in range(q**m):
        for j in range(m):
            for s in range(q):
                coeffs = interpolation_coeffs(spec, 0, s, nodes)
                entries = []
                for ti, a in zip(nodes, coeffs):
                    p = pts[u].copy()
                    p[j] ^= ti
                    entries.append((int(p @ powers), a))
                p = pts[u].copy()
                p[j] ^= s
                entries.append((int(p @ powers), 1))
                rows.append(_cancel(entries))
                labels.append((u, j, s))
    return rows, labels


def reed_muller_code(spec: FieldSpec, m: int, d: int) -> LinearCode:
    """Polynomials of individual degree <= d in m variables, evaluated on F_q^m."""
    q = spec.q
    if d >= q:
        raise ValueError(f"degree {d} is not identifiable over F_{q}")
    if m < 0 or d < 0:
        raise ValueError("m and d must be nonnegative")
    pts = _points(q, m)
    gen = []
    for alpha in itertools.product(range(d + 1), repeat=m):
        row = np.ones(q**m, dtype=np.int64)
        for j, e in enumerate(alpha):
            if e:
                row = spec.mul_array(row, np.array([spec.power(int(x), e) for x in pts[:, j]], dtype=np.int64))
        gen.append(row)
    rows, _ = _rm_rows(spec, m, d)
    h = np.zeros((len(rows), q**m), dtype=np.int64)
    for i, r in enumerate(rows):
        for c, v in r:
            h[i, c] = v
    return LinearCode(spec, np.array(gen, dtype=np.int64).reshape(-1, q**m), h, name=f"rm(q={q},m={m},d={d})")


def rm_tester(code: LinearCode, m: int, d: int) -> LocalTester:
    """Axis-parallel line test: g(u + s e_j) = sum_i a_i g(u + t_i e_j)."""
    spec = code.field
    if code.n != spec.q**m:
        raise ValueError("code length does not match q^m")
    rows, labels = _rm_rows(spec, m, d)
    return LocalTester(code, tuple(rows), _uniform(len(rows)), tuple(labels))


def composed_code(code: LinearCode) -> LinearCode:
    """Binary code obtained by writing each F_q symbol in its Hadamard encoding."""
    spec = code.field
    q, t, n = spec.q, spec.t, code.n
    xs = np.arange(q)
    gen = []
    for j in range(code.k):
        for s in range(t):
            symbols = spec.mul_array(code.generator[j], spec.basis[s])
            row = np.zeros(n * q, dtype=np.int64)
            for i, c in enumerate(symbols):
                kc = spec.kappa_bits(int(c))
                row[i * q : (i + 1) * q] = np.array([bin(kc & x).count("1") & 1 for x in xs])
            gen.append(row)
    F2 = find_self_dual_basis(1)
    return LinearCode(F2, np.array(gen, dtype=np.int64).reshape(-1, n * q), np.zeros((0, n * q), dtype=np.int64), name=f"composed({code.name})")


def _with_parity(code: LinearCode, rows: Sequence[Row]) -> LinearCode:
    h = np.zeros((len(rows), code.n), dtype=np.int64)
    for i, r in enumerate(rows):
        for c, v in r:
            h[i, c] = v
    return LinearCode(code.field, code.generator, h, code.name)


def compose_with_hadamard(code: LinearCode, tester: LocalTester) -> tuple[LinearCode, LocalTester]:
    spec = code.field
    q, n = spec.q, code.n
    base = composed_code(code)
    a_rows, a_labels = [], []
    for i in range(n):
        off = i * q
        for x in range(q):
            for y in range(q):
                a_rows.append(_cancel([(off + x, 1), (off + y, 1), (off + (x ^ y), 1)]))
                a_labels.append(("had", i, x, y))
    b_rows, b_labels = [], []
    for p, row in enumerate(tester.rows):
        for gamma in range(q):
            b_rows.append(_cancel([(col * q + spec.kappa_bits(spec.mul(gamma, coeff)), 1) for col, coeff in row]))
            b_labels.append(("lift", p, gamma))
    rows = a_rows + b_rows
    weights = (Fraction(1, 2 * len(a_rows)),) * len(a_rows) + (Fraction(1, 2 * len(b_rows)),) * len(b_rows)
    new_code = _with_parity(base, rows)
    return new_code, LocalTester(new_code, tuple(rows), weights, tuple(a_labels + b_labels))


def brm_tester(t: int, m: int, d: int) -> tuple[LinearCode, LocalTester]:
    """Binary Reed-Muller code with its low-degree plus linearity tester."""
    spec = find_self_dual_basis(t)
    q = spec.q
    if d >= q:
        raise ValueError(f"degree {d} is not identifiable over F_{q}")
    rm = reed_muller_code(spec, m, d)
    base = composed_code(rm)
    nodes = interpolation_nodes(spec, d)
    pts = _points(q, m)
    powers = q ** np.arange(m)

    def shifted(u: int, j: int, s: int) -> int:
        p = pts[u].copy()
        p[j] ^= s
        return int(p @ powers)

    ld_rows, ld_labels = [], []
    for u in range(q**m):
        for j in range(m):
            for s in range(q):
                v = shifted(u, j, s)
                coeffs = interpolation_coeffs(spec, 0, s, nodes)
                for gamma in range(q):
                    entries = [
                        (shifted(u, j, ti) * q + spec.kappa_bits(spec.mul(gamma, a)), 1)
                        for ti, a in zip(nodes, coeffs)
                        if a
                    ]
                    entries.append((v * q + spec.kappa_bits(gamma), 1))
                    ld_rows.append(_cancel(entries))
                    ld_labels.append(("ld", u, j, v, gamma))
    had_rows, had_labels = [], []
    for u in range(q**m):
        for a in range(q):
            for b in range(q):
                had_rows.append(_cancel([(u * q + a, 1), (u * q + b, 1), (u * q + (a ^ b), 1)]))
                had_labels.append(("had", u, a, b))
    rows = ld_rows + had_rows
    weights = (Fraction(1, 2 * len(ld_rows)),) * len(ld_rows) + (Fraction(1, 2 * len(had_rows)),) * len(had_rows)
    code = _with_parity(base, rows)
    code = LinearCode(code.field, code.generator, code.parity_check, name=f"brm(t={t},m={m},d={d})")
    return code, LocalTester(code, tuple(rows), weights, tuple(ld_labels + had_labels))


def code_distance(code: LinearCode, budget: int = DISTANCE_BUDGET) -> int:
    """Minimum weight of a nonzero codeword, by enumeration."""
    words = code.codewords(budget)
    weights = np.count_nonzero(words, axis=1)
    nonzero = weights[weights > 0]
    if nonzero.size == 0:
        return 0
    return int(nonzero.min())


@dataclass(frozen=True)
class SoundnessReport:
    rho: Fraction | float
    witness: tuple[int, ...]
    method: str
    samples: int
    locality: int
    note: str = ""
    seed: int | None = None

    def to_json(self) -> dict:
        return {
            "rho": str(self.rho) if isinstance(self.rho, Fraction) else self.rho,
            "rho_float": float(self.rho),
            "witness": list(self.witness),
            "method": self.method,
            "samples": self.samples,
            "locality": self.locality,
            "note": self.note,
            "seed": self.seed,
        }


def _integer_weights(weights: Sequence[Fraction]) -> tuple[np.ndarray, int]:
    L = reduce(lambda a, b: a * b // math.gcd(a, b), (w.denominator for w in weights), 1)
    return np.array([int(w * L) for w in weights], dtype=np.int64), L


def _mul_tables(spec: FieldSpec) -> np.ndarray:
    q = spec.q
    return np.array([[spec.mul(a, b) for b in range(q)] for a in range(q)], dtype=np.int64)


def _exhaustive_soundness(tester: LocalTester, chunk: int = 1 << 18) -> SoundnessReport:
    code = tester.code
    spec = code.field
    t, q, n = spec.t, spec.q, code.n
    size = 1 << (t * n)
    shifts = t * np.arange(n, dtype=np.int64)

    # distance to the code for every word, by multi-source BFS on the Hamming graph
    cws = code.codewords()
    packed = (cws << shifts).sum(axis=1) if n else np.zeros(1, dtype=np.int64)
    dist = np.full(size, -1, dtype=np.int16)
    dist[packed] = 0
    frontier = np.unique(packed)
    moves = np.array([v << (t * i) for i in range(n) for v in range(1, q)], dtype=np.int64)
    level = 0
    while frontier.size:
        level += 1
        nbrs = np.unique((frontier[:, None] ^ moves[None, :]).ravel())
        nbrs = nbrs[dist[nbrs] < 0]
        dist[nbrs] = level
        frontier = nbrs

    int_w, L = _integer_weights(tester.weights)
    table = _mul_tables(spec)
    rejection = np.zeros(size, dtype=np.int64)
    for start in range(0, size, chunk):
        words = np.arange(start, min(size, start + chunk), dtype=np.int64)
        symbols = (words[:, None] >> shifts[None, :]) & (q - 1)
        acc = np.zeros(words.size, dtype=np.int64)
        for row, w in zip(tester.rows, int_w):
            if not row or not w:
                continue
            s = np.zeros(words.size, dtype=np.int64)
            for col, coeff in row:
                s ^= table[coeff][symbols[:, col]]
            acc += w * (s != 0)
        rejection[start : start + words.size] = acc

    best: Fraction | None = None
    witness = 0
    for delta in np.unique(dist):
        if delta <= 0:
            continue
        mask = np.flatnonzero(dist == delta)
        j = mask[np.argmin(rejection[mask])]
        ratio = Fraction(int(rejection[j]) * n, L * int(delta))
        if best is None or ratio < best:
            best, witness = ratio, int(j)
    if best is None:
        best = Fraction(0)
        note = "code is the whole space; no non-codewords"
    else:
        note = "exact minimum over all non-codewords"
    word = tuple(int((witness >> (t * i)) & (q - 1)) for i in range(n))
    return SoundnessReport(best, word, "exhaustive", size - len(np.unique(packed)), tester.locality, note)


def _sampled_soundness(tester: LocalTester, samples: int, seed: int) -> SoundnessReport:
    code = tester.code
    spec = code.field
    q, n = spec.q, code.n
    rng = np.random.default_rng(seed)
    cws = code.codewords(budget=1 << 16)
    dense = tester.dense()
    nu = tester.weights
    table = _mul_tables(spec)
    best: Fraction | None = None
    witness: tuple[int, ...] = ()
    drawn = 0
    per_weight = max(1, samples // max(1, n))
    for weight in range(1, n + 1):
        for _ in range(per_weight):
            c = cws[rng.integers(len(cws))]
            err = np.zeros(n, dtype=np.int64)
            pos = rng.choice(n, size=weight, replace=False)
            err[pos] = rng.integers(1, q, size=weight)
            x = c ^ err
            delta = int(np.count_nonzero(cws ^ x[None, :], axis=1).min())
            if delta == 0:
                continue
            drawn += 1
            checks = np.bitwise_xor.reduce(table[dense, x[None, :]], axis=1)
            rej = sum((w for w, s in zip(nu, checks) if s), Fraction(0))
            ratio = rej * n / delta
            if best is None or ratio < best:
                best, witness = ratio, tuple(int(v) for v in x)
    note = (
        f"minimum over {drawn} sampled non-codewords stratified by error weight; "
        "the true minimum can only be smaller"
    )
    return SoundnessReport(best if best is not None else Fraction(0), witness, "sampled", drawn, tester.locality, note, seed)


def tester_soundness(
    tester: LocalTester,
    budget: int = DEFAULT_SOUNDNESS_BUDGET,
    method: str = "auto",
    samples: int = 2000,
    seed: int = 0,
) -> SoundnessReport:
    """Soundness ratio min_x Pr_nu[row rejects x] / (d(x, C)/n)."""
    space = tester.code.q ** tester.code.n
    if method not in ("auto", "exhaustive", "sampled"):
        raise ValueError(f"unknown method {method!r}")
    if method == "exhaustive" and space > budget:
        raise ValueError(f"search space {space} exceeds the budget {budget}")
    if method == "exhaustive" or (method == "auto" and space <= budget):
        return _exhaustive_soundness(tester)
    return _sampled_soundness(tester, samples, seed)


def evaluate_polynomial(spec: FieldSpec, coeffs: dict[tuple[int, ...], int], point: Sequence[int]) -> int:
    """Evaluate sum_alpha c_alpha x^alpha at a point of F_q^m."""
    total = 0
    for alpha, c in coeffs.items():
        term = c
        for x, e in zip(point, alpha):
            term = spec.mul(term, spec.power(int(x), e))
        total ^= term
    return total


CODE_FAMILIES = ("hadamard", "rm", "composed", "brm")


def build_code_family(family: str, t: int, m: int = 1, d: int = 1) -> tuple[LinearCode, LocalTester]:
    """(code, tester) for one of the named families."""
    if family == "hadamard":
        return hadamard_code(t)
    if family == "brm":
        return brm_tester(t, m, d)
    if family in ("rm", "composed"):
        rm = reed_muller_code(find_self_dual_basis(t), m, d)
        tester = rm_tester(rm, m, d)
        return (rm, tester) if family == "rm" else compose_with_hadamard(rm, tester)
    raise ValueError(f"unknown code family {family!r}; expected one of {CODE_FAMILIES}")
