"""Pauli observables sigma^X(a), sigma^Z(b) on k qubits and their projectors.

Bit i-1 of the integer a is the exponent a_i on qubit i, and qubit 1 is the
leftmost tensor factor (so it is the most significant bit of a basis index).
X-type operators are kept as a flip mask, Z-type ones as a sign mask; dense
matrices are built on demand.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import UnitaryAssignment, op_norm

__all__ = [
    "PauliLabel",
    "MAX_QUBITS",
    "index_mask",
    "pauli_observable",
    "pauli_projector",
    "pauli_pvm",
    "braiding_relation_check",
    "pauli_group_order_check",
    "pauli_small_assignment",
]

MAX_QUBITS = 12


def _popcount(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x.astype(np.uint64)).astype(np.int64)


def index_mask(a: int, k: int) -> int:
    """Position of the vector a inside a basis-state index (bit reversal over k bits)."""
    out = 0
    for i in range(k):
        if (a >> i) & 1:
            out |= 1 << (k - 1 - i)
    return out


@dataclass(frozen=True)
class PauliLabel:
    basis: str
    a: int
    k: int

    def __post_init__(self) -> None:
        if self.basis not in ("X", "Z"):
            raise ValueError("basis must be 'X' or 'Z'")
        if not 0 <= self.k <= MAX_QUBITS:
            raise ValueError(f"k must lie in 0..{MAX_QUBITS}")
        if not 0 <= self.a < 1 << self.k:
            raise ValueError("vector does not fit in k bits")

    @property
    def dim(self) -> int:
        return 1 << self.k

    def flip_mask(self) -> int:
        return index_mask(self.a, self.k) if self.basis == "X" else 0

    def sign_mask(self) -> int:
        return index_mask(self.a, self.k) if self.basis == "Z" else 0

    def apply(self, state: np.ndarray) -> np.ndarray:
        """Act on a vector (or the rows of a matrix) without forming the operator."""
        s = np.arange(self.dim)
        if self.basis == "X":
            return state[s ^ self.flip_mask()]
        signs = 1 - 2 * (_popcount(s & self.sign_mask()) & 1)
        return signs.reshape((-1,) + (1,) * (state.ndim - 1)) * state


def pauli_observable(label: PauliLabel) -> np.ndarray:
    d = label.dim
    s = np.arange(d)
    if label.basis == "X":
        out = np.zeros((d, d))
        out[s ^ label.flip_mask(), s] = 1.0
        return out
    return np.diag((1 - 2 * (_popcount(s & label.sign_mask()) & 1)).astype(float))


def pauli_projector(basis: str, u: int, k: int) -> np.ndarray:
    """sigma^W_u = E_alpha (-1)^{u.alpha} sigma^W(alpha)."""
    PauliLabel(basis, u, k)
    d = 1 << k
    m = index_mask(u, k)
    if basis == "Z":
        out = np.zeros((d, d))
        out[m, m] = 1.0
        return out
    s = np.arange(d)
    return (1 - 2 * (_popcount((s[:, None] ^ s[None, :]) & m) & 1)).astype(float) / d


def pauli_pvm(basis: str, k: int) -> np.ndarray:
    return np.array([pauli_projector(basis, u, k) for u in range(1 << k)])


def braiding_relation_check(a: int, b: int, k: int) -> float:
    """||sigma^X(a) sigma^Z(b) - (-1)^{a.b} sigma^Z(b) sigma^X(a)||_op."""
    X = pauli_observable(PauliLabel("X", a, k))
    Z = pauli_observable(PauliLabel("Z", b, k))
    sign = -1.0 if bin(a & b).count("1") & 1 else 1.0
    return op_norm(X @ Z - sign * Z @ X)


def pauli_group_order_check(k: int) -> int:
    """Size of the group generated by the single-qubit sigma^X(e_i), sigma^Z(e_i)."""
    if not 1 <= k <= 4:
        raise ValueError("k must lie in 1..4")
    gens = [pauli_observable(PauliLabel(W, 1 << i, k)) for W in "XZ" for i in range(k)]

    def key(M: np.ndarray) -> bytes:
        return np.rint(M).astype(np.int8).tobytes()

    I = np.eye(1 << k)
    seen = {key(I)}
    frontier = [I]
    while frontier:
        nxt = []
        for M in frontier:
            for g in gens:
                P = M @ g
                kk = key(P)
                if kk not in seen:
                    seen.add(kk)
                    nxt.append(P)
        frontier = nxt
    return len(seen)


def pauli_small_assignment(k: int) -> UnitaryAssignment:
    """x_i -> sigma^X(e_i), z_i -> sigma^Z(e_i), J -> -Id."""
    mats = [pauli_observable(PauliLabel("X", 1 << i, k)) for i in range(k)]
    mats += [pauli_observable(PauliLabel("Z", 1 << i, k)) for i in range(k)]
    mats.append(-np.eye(1 << k))
    return UnitaryAssignment(np.array(mats))
