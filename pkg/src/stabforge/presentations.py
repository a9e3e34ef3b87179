"""Finite presentations <S : R> with weighted relations.

A word is a tuple of (generator, exponent) letters with exponent +1 or -1.
Relations carry a tag and a weight; the weights form the relation
distribution mu_R.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .codes import _points, interpolation_coeffs, interpolation_nodes
from .fields import BitMatrix, find_self_dual_basis, gf2_rank
from .operators import UnitaryAssignment, tracial_norm_sq

__all__ = [
    "Word",
    "Relation",
    "Presentation",
    "GeneratorDistribution",
    "commutator",
    "word_inverse",
    "relation_key",
    "presentation_from_parity_check",
    "abelian_rank",
    "presentation_length",
    "std_z2k",
    "pauli_small",
    "pauli_mult_like",
    "multiplication_table_z2k",
    "z2k_eff_presentation",
    "induced_generator_distribution",
    "sample_relation",
    "sample_relation_indices",
    "evaluate_word",
    "permutation_group",
    "orbit_weights",
    "automorphism_orbit_amplify",
    "RELATION_TAGS",
]

Word = tuple[tuple[int, int], ...]
RELATION_TAGS = ("involution", "commutation", "row", "braiding", "product")
MAX_GROUP_ORDER = 5040


def commutator(i: int, j: int) -> Word:
    """[x_i, x_j] = x_i x_j x_i^-1 x_j^-1."""
    return ((i, 1), (j, 1), (i, -1), (j, -1))


def word_inverse(w: Word) -> Word:
    return tuple((g, -e) for g, e in reversed(w))


def relation_key(w: Word) -> Word:
    """Canonical form of the relation w = e: the least cyclic rotation of w or w^-1.

    Two words with the same key define the same relation up to conjugation and
    inversion, which leaves every defect norm unchanged."""
    candidates = []
    for v in (tuple(w), word_inverse(tuple(w))):
        for s in range(max(1, len(v))):
            candidates.append(v[s:] + v[:s])
    return min(candidates)


@dataclass(frozen=True)
class Relation:
    word: Word
    tag: str
    weight: float

    def __len__(self) -> int:
        return len(self.word)


@dataclass(frozen=True)
class GeneratorDistribution:
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if any(w < -1e-15 for w in self.weights):
            raise ValueError("negative generator weight")
        if abs(sum(self.weights) - 1) > 1e-12:
            raise ValueError("generator weights must sum to 1")

    def as_array(self) -> np.ndarray:
        return np.array(self.weights)


class Presentation:
    def __init__(
        self,
        n_generators: int,
        relations: Sequence[Relation],
        name: str = "",
        labels: Sequence | None = None,
    ):
        self.n_generators = n_generators
        self.relations = tuple(relations)
        self.name = name
        self.labels = tuple(labels) if labels is not None else None
        total = 0.0
        for r in self.relations:
            if r.tag not in RELATION_TAGS:
                raise ValueError(f"unknown relation tag {r.tag!r}")
            if r.weight < 0:
                raise ValueError("negative relation weight")
            for g, e in r.word:
                if not 0 <= g < n_generators or e not in (1, -1):
                    raise ValueError(f"bad letter {(g, e)} in relation {r.word}")
            total += r.weight
        if self.relations and abs(total - 1) > 1e-12:
            raise ValueError(f"relation weights sum to {total}, not 1")

    def __len__(self) -> int:
        return len(self.relations)

    def __repr__(self) -> str:
        return f"Presentation({self.name!r}, generators={self.n_generators}, relations={len(self.relations)})"

    @property
    def weights(self) -> np.ndarray:
        return np.array([r.weight for r in self.relations])

    def tags(self) -> list[str]:
        return sorted({r.tag for r in self.relations})

    def to_json(self) -> dict:
        return {
            "n": self.n_generators,
            "name": self.name,
            "relations": [
                {"word": [[g, e] for g, e in r.word], "tag": r.tag, "weight": r.weight} for r in self.relations
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Presentation":
        rels = [
            Relation(tuple((int(g), int(e)) for g, e in r["word"]), r["tag"], float(r["weight"]))
            for r in data["relations"]
        ]
        return cls(int(data["n"]), rels, data.get("name", ""))


def _family_weights(families: Mapping[str, Sequence[tuple[Word, float]]], mix: Mapping[str, float]) -> list[Relation]:
    """Spread each family's mass over its members proportionally to the given
    within-family weights; empty families donate their mass to the rest."""
    live = {tag: mix[tag] for tag, members in families.items() if members and mix.get(tag, 0) > 0}
    scale = sum(live.values())
    out = []
    for tag, members in families.items():
        mass = live.get(tag, 0.0) / scale if scale else 0.0
        inner = sum(w for _, w in members)
        for word, w in members:
            out.append(Relation(word, tag, mass * w / inner if inner else 0.0))
    return out


def _rows_of(h) -> tuple[int, list[list[int]]]:
    if isinstance(h, BitMatrix):
        return h.ncols, [[j for j in range(h.ncols) if (r >> j) & 1] for r in h.rows]
    arr = np.asarray(h, dtype=np.int64)
    if arr.ndim != 2:
        raise ValueError("parity check must be a matrix")
    if np.any((arr != 0) & (arr != 1)):
        raise ValueError("parity check must be binary")
    return arr.shape[1], [[int(j) for j in np.flatnonzero(row)] for row in arr]


def presentation_from_parity_check(h, all_commutators: bool = False, mu_spec="thirds") -> Presentation:
    """The group G(h): involutions, one relation per nonzero row, and commutators.

    mu_spec is "thirds" (a third of the mass on each family, uniform inside),
    "game" (the distribution induced by the code game), or a mapping from tag
    to family mass."""
    n, supports = _rows_of(h)
    if n == 0 or not supports:
        raise ValueError("empty parity check")
    supports = [s for s in supports if s]
    involutions = [((j, 1), (j, 1)) for j in range(n)]
    rows = [tuple((j, 1) for j in s) for s in supports]
    if all_commutators:
        pairs = list(itertools.combinations(range(n), 2))
    else:
        pairs = sorted({p for s in supports for p in itertools.combinations(s, 2)})
    comms = [commutator(i, j) for i, j in pairs]

    if mu_spec == "game":
        return _game_weighted(n, supports, involutions, rows, pairs, comms, all_commutators)
    mix = {"involution": 1 / 3, "commutation": 1 / 3, "row": 1 / 3} if mu_spec == "thirds" else dict(mu_spec)
    families = {
        "involution": [(w, 1.0) for w in involutions],
        "row": [(w, 1.0) for w in rows],
        "commutation": [(w, 1.0) for w in comms],
    }
    name = "G~(h)" if all_commutators else "G(h)"
    return Presentation(n, _family_weights(families, mix), name=name)


def _game_weighted(n, supports, involutions, rows, pairs, comms, all_commutators) -> Presentation:
    """j uniform over rows admitting two distinct variables, (i, i') uniform
    ordered distinct in row j, then a third each on x_i^2, row j, [x_i, x_i']."""
    usable = [r for r, s in enumerate(supports) if len(s) >= 2]
    if not usable:
        raise ValueError("no row has two variables; the game distribution is undefined")
    inv_w = defaultdict(Fraction)
    row_w = defaultdict(Fraction)
    com_w = defaultdict(Fraction)
    pj = Fraction(1, len(usable))
    for r in usable:
        s = supports[r]
        row_w[r] += pj / 3
        for i in s:
            inv_w[i] += pj / len(s) / 3
        for i, ip in itertools.permutations(s, 2):
            com_w[(min(i, ip), max(i, ip))] += pj / (len(s) * (len(s) - 1)) / 3
    rels = [Relation(w, "involution", float(inv_w[j])) for j, w in enumerate(involutions)]
    rels += [Relation(w, "row", float(row_w[r])) for r, w in enumerate(rows)]
    rels += [Relation(w, "commutation", float(com_w[p])) for p, w in zip(pairs, comms)]
    return Presentation(n, rels, name="G~(h)" if all_commutators else "G(h)")


def abelian_rank(h) -> int:
    """n - rank(h): the rank of G(h) with all commutators added."""
    if isinstance(h, BitMatrix):
        return h.ncols - gf2_rank(h)
    arr = np.asarray(h, dtype=np.int64)
    return arr.shape[1] - gf2_rank(arr)


def presentation_length(P: Presentation) -> int:
    return P.n_generators + sum(len(r.word) for r in P.relations)


def std_z2k(k: int) -> Presentation:
    """<x_1..x_k : [x_i, x_j], x_i^2>, half the mass on each family."""
    if k < 1:
        raise ValueError("k must be positive")
    families = {
        "commutation": [(commutator(i, j), 1.0) for i, j in itertools.combinations(range(k), 2)],
        "involution": [(((i, 1), (i, 1)), 1.0) for i in range(k)],
    }
    rels = _family_weights(families, {"commutation": 0.5, "involution": 0.5})
    return Presentation(k, rels, name=f"std_z2k({k})")


def pauli_small(k: int) -> Presentation:
    """Generators x_1..x_k, z_1..z_k, J (indices 0..k-1, k..2k-1, 2k).

    Relation classes drawn with equal probability: J^2; one of x_i^2, z_i^2;
    [x_i, z_i] J^-1; a commutator between distinct qubits. Relations
    [x_i, J], [z_i, J] are present with weight zero."""
    if k < 1:
        raise ValueError("k must be positive")
    J = 2 * k
    x = list(range(k))
    z = list(range(k, 2 * k))
    jsq = [(((J, 1), (J, 1)), 1.0)]
    squares = [(((g, 1), (g, 1)), 1.0) for g in x + z]
    twisted = [(commutator(x[i], z[i]) + ((J, -1),), 1.0) for i in range(k)]
    cross = []
    if k > 1:
        n_pairs = k * (k - 1) // 2
        for i, j in itertools.combinations(range(k), 2):
            cross.append((commutator(x[i], x[j]), 1 / (3 * n_pairs)))
            cross.append((commutator(z[i], z[j]), 1 / (3 * n_pairs)))
        for i, j in itertools.permutations(range(k), 2):
            cross.append((commutator(x[i], z[j]), 1 / (3 * k * (k - 1))))
    central = [(commutator(g, J), 1.0) for g in x + z]
    rels = []
    live = [fam for fam in (jsq, squares, twisted, cross) if fam]
    for tag, fam in (("involution", jsq), ("involution", squares), ("braiding", twisted), ("commutation", cross)):
        if not fam:
            continue
        inner = sum(w for _, w in fam)
        rels += [Relation(w, tag, wt / inner / len(live)) for w, wt in fam]
    rels += [Relation(w, "commutation", 0.0) for w, _ in central]
    labels = [f"x{i + 1}" for i in range(k)] + [f"z{i + 1}" for i in range(k)] + ["J"]
    return Presentation(2 * k + 1, rels, name=f"pauli_small({k})", labels=labels)


MAX_MULT_LIKE_K = 8


def pauli_mult_like(k: int) -> Presentation:
    """Generators J, (a,0) and (0,b) for a, b in Z_2^k.

    Index 0 is J, 1 + a is (a,0), 1 + 2^k + b is (0,b). The five relation
    families get equal mass, uniform inside each family."""
    if not 1 <= k <= MAX_MULT_LIKE_K:
        raise ValueError(f"k must lie in 1..{MAX_MULT_LIKE_K} for an explicit relation list")
    K = 1 << k
    J = 0

    def X(a: int) -> int:
        return 1 + a

    def Z(b: int) -> int:
        return 1 + K + b

    gens = [X(a) for a in range(K)] + [Z(b) for b in range(K)]
    involutions = [(((g, 1), (g, 1)), 1.0) for g in [J] + gens]
    central = [(commutator(g, J), 1.0) for g in gens]
    x_mult = [(((X(a), 1), (X(b), 1), (X(a ^ b), -1)), 1.0) for a in range(K) for b in range(K)]
    z_mult = [(((Z(a), 1), (Z(b), 1), (Z(a ^ b), -1)), 1.0) for a in range(K) for b in range(K)]
    twisted = []
    for a in range(K):
        for b in range(K):
            w = ((X(a), 1), (Z(b), 1), (X(a), -1), (Z(b), -1))
            if bin(a & b).count("1") & 1:
                w = w + ((J, -1),)
            twisted.append((w, 1.0))
    families = {
        "involution": involutions,
        "commutation": central,
        "product": x_mult + z_mult,
        "braiding": twisted,
    }
    mix = {"involution": 0.2, "commutation": 0.2, "product": 0.4, "braiding": 0.2}
    return Presentation(2 * K + 1, _family_weights(families, mix), name=f"pauli_mult_like({k})")


def multiplication_table_z2k(k: int) -> Presentation:
    """One generator per group element and one relation g_a g_b g_{a+b}^-1 per pair."""
    K = 1 << k
    rels = [
        Relation(((a, 1), (b, 1), (a ^ b, -1)), "product", 1 / (K * K)) for a in range(K) for b in range(K)
    ]
    return Presentation(K, rels, name=f"mult_table_z2k({k})")


def z2k_eff_presentation(t: int, m: int, d: int) -> Presentation:
    """The presentation of Z_2^K built on the binary Reed-Muller tester.

    Generator (u, a) with u a point of F_q^m and a in F_2^t has index u*q + a."""
    spec = find_self_dual_basis(t)
    q = spec.q
    if d >= q:
        raise ValueError(f"degree {d} is not identifiable over F_{q}")
    if m < 1:
        raise ValueError("m must be at least 1")
    npts = q**m
    N = npts * q
    nodes = interpolation_nodes(spec, d)
    pts = _points(q, m)
    powers = q ** np.arange(m)

    def shifted(u: int, j: int, s: int) -> int:
        p = pts[u].copy()
        p[j] ^= s
        return int(p @ powers)

    sq = [Relation(((g, 1), (g, 1)), "involution", 0.25 / N) for g in range(N)]
    had = [
        Relation(((u * q + a, 1), (u * q + b, 1), (u * q + (a ^ b), 1)), "row", 0.25 / (npts * q * q))
        for u in range(npts)
        for a in range(q)
        for b in range(q)
    ]
    ld = []
    w_ld = 0.25 / (npts * m * q * q)
    for u in range(npts):
        for j in range(m):
            for s in range(q):
                v = shifted(u, j, s)
                coeffs = interpolation_coeffs(spec, 0, s, nodes)
                for gamma in range(q):
                    word = [
                        (shifted(u, j, ti) * q + spec.kappa_bits(spec.mul(gamma, a)), 1)
                        for ti, a in zip(nodes, coeffs)
                        if a
                    ]
                    word.append((v * q + spec.kappa_bits(gamma), 1))
                    ld.append(Relation(tuple(word), "row", w_ld))

    com: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
    share = Fraction(1, 2) if d >= 1 else Fraction(1)
    if d >= 1:
        base = share / (npts * m * (d + 1) * d * q * q)
        for u in range(npts):
            for j in range(m):
                for i, ip in itertools.permutations(range(d + 1), 2):
                    pu, pv = shifted(u, j, nodes[i]), shifted(u, j, nodes[ip])
                    for a in range(q):
                        for b in range(q):
                            com[(pu * q + a, pv * q + b)] += base
    for j in range(1, m + 1):
        # v, v' agree on their last j - 1 coordinates
        free = m - j + 1
        p_pair = Fraction(1, q ** (j - 1)) * Fraction(1, q**free) ** 2
        base = share / m * p_pair / (q * q)
        for v in range(npts):
            for vp in range(npts):
                if np.array_equal(pts[v][free:], pts[vp][free:]):
                    for a in range(q):
                        for b in range(q):
                            com[(v * q + a, vp * q + b)] += base
    comm = [Relation(commutator(g1, g2), "commutation", 0.25 * float(w)) for (g1, g2), w in sorted(com.items())]
    labels = [(u, a) for u in range(npts) for a in range(q)]
    return Presentation(N, sq + ld + had + comm, name=f"z2k_eff(t={t},m={m},d={d})", labels=labels)


def induced_generator_distribution(P: Presentation) -> GeneratorDistribution:
    """mu_S(s) = E_{r ~ mu_R}[multiplicity of s in r / |r|]."""
    out = np.zeros(P.n_generators)
    for r in P.relations:
        if not r.word:
            raise ValueError("zero-length relation")
        for g, _ in r.word:
            out[g] += r.weight / len(r.word)
    return GeneratorDistribution(tuple(out.tolist()))


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def sample_relation_indices(P: Presentation, count: int, seed) -> np.ndarray:
    w = P.weights
    return _rng(seed).choice(len(w), size=count, p=w / w.sum())


def sample_relation(P: Presentation, seed) -> Word:
    return P.relations[int(sample_relation_indices(P, 1, seed)[0])].word


def evaluate_word(w: Word, A: UnitaryAssignment) -> np.ndarray:
    """Product of the assigned unitaries; exponent -1 takes the adjoint."""
    out = np.eye(A.dim, dtype=complex)
    for g, e in w:
        if not 0 <= g < len(A):
            raise KeyError(f"generator {g} has no assigned unitary")
        U = A[g]
        out = out @ (U if e == 1 else U.conj().T)
    return out


def _apply_perm(perm: Sequence[int], w: Word) -> Word:
    return tuple((perm[g], e) for g, e in w)


def _check_automorphism(perm: Sequence[int], P: Presentation) -> None:
    if sorted(perm) != list(range(P.n_generators)):
        raise ValueError("not a permutation of the generators")
    before = Counter(relation_key(r.word) for r in P.relations)
    after = Counter(relation_key(_apply_perm(perm, r.word)) for r in P.relations)
    if before != after:
        raise ValueError("permutation does not map the relation set to itself")


def permutation_group(perms: Sequence[Sequence[int]], n: int, budget: int = MAX_GROUP_ORDER) -> list[tuple[int, ...]]:
    """All elements of the group generated by perms, identity first."""
    identity = tuple(range(n))
    group = [identity]
    seen = {identity}
    frontier = [identity]
    gens = [tuple(p) for p in perms]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = tuple(s[g[i]] for i in range(n))
                if h not in seen:
                    seen.add(h)
                    group.append(h)
                    nxt.append(h)
                    if len(group) > budget:
                        raise ValueError(f"group order exceeds the budget {budget}")
        frontier = nxt
    return group


def orbit_weights(P: Presentation, perms: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[float]]:
    """Orbits of the relations (as index lists) and their total weights."""
    for p in perms:
        _check_automorphism(p, P)
    group = permutation_group(perms, P.n_generators)
    keys = [relation_key(r.word) for r in P.relations]
    index_of: dict[Word, list[int]] = defaultdict(list)
    for i, k in enumerate(keys):
        index_of[k].append(i)
    assigned = [-1] * len(keys)
    orbits: list[list[int]] = []
    for i, r in enumerate(P.relations):
        if assigned[i] >= 0:
            continue
        members: set[int] = set()
        for g in group:
            members.update(index_of[relation_key(_apply_perm(g, r.word))])
        for m_ in members:
            assigned[m_] = len(orbits)
        orbits.append(sorted(members))
    return orbits, [float(sum(P.relations[i].weight for i in orb)) for orb in orbits]


def automorphism_orbit_amplify(
    A: UnitaryAssignment, perms: Sequence[Sequence[int]], P: Presentation, budget: int = MAX_GROUP_ORDER
) -> UnitaryAssignment:
    """rho'(s) = direct sum over alpha in Phi of rho(alpha(s))."""
    if len(A) != P.n_generators:
        raise ValueError("assignment does not cover the presentation")
    for p in perms:
        _check_automorphism(p, P)
    group = permutation_group(perms, P.n_generators, budget)
    d = A.dim
    D = d * len(group)
    mats = np.zeros((P.n_generators, D, D), dtype=complex)
    for b, alpha in enumerate(group):
        sl = slice(b * d, (b + 1) * d)
        for s in range(P.n_generators):
            mats[s, sl, sl] = A[alpha[s]]
    return UnitaryAssignment(mats, check=False)


def relation_defects(A: UnitaryAssignment, P: Presentation) -> np.ndarray:
    """||phi(r) - Id||_tau^2 for every relation, in order."""
    I = np.eye(A.dim)
    return np.array([tracial_norm_sq(evaluate_word(r.word, A) - I) for r in P.relations])
