"""Matrix carriers shared by the stability, pauli and games modules.

All traces are dimension-normalized: tau(X) = Tr(X)/d.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import unitary_group

__all__ = [
    "UnitaryAssignment",
    "CornerEmbedding",
    "tau",
    "tracial_norm_sq",
    "op_norm",
    "matrix_to_json",
    "matrix_from_json",
    "haar_unitary",
    "random_hermitian",
    "random_pvm",
    "random_partial_isometry",
    "is_pvm",
    "TOL",
]

TOL = 1e-9


def tau(X: np.ndarray) -> complex:
    return np.trace(X) / X.shape[0]


def tracial_norm_sq(X: np.ndarray) -> float:
    """||X||_tau^2 = tau(X* X)."""
    return float(np.vdot(X, X).real) / X.shape[0]


def op_norm(X: np.ndarray) -> float:
    return float(np.linalg.norm(X, 2)) if X.size else 0.0


class UnitaryAssignment:
    """Generators of a presentation mapped to d x d unitaries."""

    def __init__(self, matrices: Sequence[np.ndarray] | np.ndarray, check: bool = True):
        mats = np.asarray(matrices, dtype=complex)
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
            raise ValueError("expected a stack of square matrices")
        self.matrices = mats
        self.matrices.setflags(write=False)
        if check:
            d = self.dim
            for i, U in enumerate(mats):
                if op_norm(U.conj().T @ U - np.eye(d)) > TOL:
                    raise ValueError(f"generator {i} is not unitary")

    @property
    def dim(self) -> int:
        return int(self.matrices.shape[1])

    def __len__(self) -> int:
        return int(self.matrices.shape[0])

    def __getitem__(self, i: int) -> np.ndarray:
        return self.matrices[i]

    def conjugate(self, V: np.ndarray) -> "UnitaryAssignment":
        return UnitaryAssignment(V @ self.matrices @ V.conj().T, check=False)

    def to_json(self) -> dict:
        return {"d": self.dim, "generators": [matrix_to_json(U) for U in self.matrices]}

    @classmethod
    def from_json(cls, data: dict) -> "UnitaryAssignment":
        mats = [matrix_from_json(m) for m in data["generators"]]
        d = int(data["d"])
        if any(M.shape != (d, d) for M in mats):
            raise ValueError("generator shape does not match d")
        return cls(np.array(mats).reshape(len(mats), d, d))


@dataclass(frozen=True, eq=False)
class CornerEmbedding:
    """A d' x d contraction w, meant to be (close to) a partial isometry."""

    w: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.w, dtype=complex)
        object.__setattr__(self, "w", w)
        if w.ndim != 2:
            raise ValueError("w must be a matrix")
        if op_norm(w) > 1 + TOL:
            raise ValueError("w is not a contraction")

    @classmethod
    def identity(cls, d: int) -> "CornerEmbedding":
        return cls(np.eye(d))

    @classmethod
    def inclusion(cls, d: int, target: int) -> "CornerEmbedding":
        w = np.zeros((target, d))
        w[:d, :d] = np.eye(d)
        return cls(w)

    @property
    def source_dim(self) -> int:
        return int(self.w.shape[1])

    @property
    def target_dim(self) -> int:
        return int(self.w.shape[0])

    def pull(self, X: np.ndarray) -> np.ndarray:
        """w* X w."""
        return self.w.conj().T @ X @ self.w

    def source_deficit(self) -> float:
        return float(tau(np.eye(self.source_dim) - self.w.conj().T @ self.w).real)

    def target_deficit(self) -> float:
        return float(tau(np.eye(self.target_dim) - self.w @ self.w.conj().T).real)

    def deficit(self) -> float:
        return max(self.source_deficit(), self.target_deficit())


def matrix_to_json(M: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(M, dtype=complex)]


def matrix_from_json(data: list) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise ValueError("matrices are rows of (re, im) pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(d, random_state=rng) if d > 1 else np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))


def random_hermitian(d: int, rng: np.random.Generator, norm: float = 1.0) -> np.ndarray:
    """Random Hermitian matrix scaled to the given operator norm."""
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    H = (A + A.conj().T) / 2
    return H * (norm / op_norm(H))


def random_pvm(d: int, outcomes: int, rng: np.random.Generator, ranks: Iterable[int] | None = None) -> np.ndarray:
    """A projective measurement with the given number of outcomes (some may be zero)."""
    U = haar_unitary(d, rng)
    if ranks is None:
        labels = rng.integers(outcomes, size=d)
    else:
        ranks = list(ranks)
        if sum(ranks) != d or len(ranks) != outcomes:
            raise ValueError("ranks must sum to d")
        labels = np.repeat(np.arange(outcomes), ranks)
    out = np.zeros((outcomes, d, d), dtype=complex)
    for a in range(outcomes):
        cols = U[:, labels == a]
        out[a] = cols @ cols.conj().T
    return out


def random_partial_isometry(target: int, source: int, rank: int, rng: np.random.Generator) -> CornerEmbedding:
    if rank > min(target, source):
        raise ValueError("rank too large")
    A = haar_unitary(target, rng)[:, :rank]
    B = haar_unitary(source, rng)[:, :rank]
    return CornerEmbedding(A @ B.conj().T)


def is_pvm(P: np.ndarray, tol: float = TOL) -> str | None:
    """Return the name of the first violated PVM axiom, or None."""
    d = P.shape[1]
    for a, Pa in enumerate(P):
        if op_norm(Pa - Pa.conj().T) > tol:
            return f"hermitian(outcome {a})"
        if op_norm(Pa @ Pa - Pa) > tol:
            return f"projective(outcome {a})"
    if op_norm(P.sum(axis=0) - np.eye(d)) > tol:
        return "completeness"
    return None
