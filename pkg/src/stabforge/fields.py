"""Bit-packed GF(2) linear algebra and GF(2^t) arithmetic.

Vectors over F_2 are Python ints (bit i is coordinate i). Field elements of
F_{2^t} are ints in the polynomial basis; the field carries log/antilog tables
and a self-dual basis used by :func:`kappa`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "BitVector",
    "BitMatrix",
    "FieldSpec",
    "FieldElement",
    "gf2_rank",
    "gf2_kernel",
    "field_mul",
    "field_trace",
    "find_self_dual_basis",
    "kappa",
    "kappa_inv",
    "MAX_FIELD_EXPONENT",
]

MAX_FIELD_EXPONENT = 12


def _parity(x: int) -> int:
    return bin(x).count("1") & 1


@dataclass(frozen=True)
class BitVector:
    """A length-n vector over F_2 packed into an int."""

    length: int
    bits: int = 0

    def __post_init__(self) -> None:
        if self.length < 0:
            raise ValueError("negative length")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError(f"payload does not fit in {self.length} bits")

    @classmethod
    def from_list(cls, values: Sequence[int]) -> "BitVector":
        bits = 0
        for i, v in enumerate(values):
            if v & 1:
                bits |= 1 << i
        return cls(len(values), bits)

    def to_list(self) -> list[int]:
        return [(self.bits >> i) & 1 for i in range(self.length)]

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __len__(self) -> int:
        return self.length

    def __add__(self, other: "BitVector") -> "BitVector":
        if other.length != self.length:
            raise ValueError("length mismatch")
        return BitVector(self.length, self.bits ^ other.bits)

    __xor__ = __add__

    def dot(self, other: "BitVector") -> int:
        if other.length != self.length:
            raise ValueError("length mismatch")
        return _parity(self.bits & other.bits)

    @property
    def weight(self) -> int:
        return bin(self.bits).count("1")


class BitMatrix:
    """An m x n matrix over F_2 stored as one packed int per row."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Iterable[int] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        packed = tuple(rows) if rows is not None else (0,) * nrows
        if len(packed) != nrows:
            raise ValueError("row count mismatch")
        for r in packed:
            if r < 0 or r >> ncols:
                raise ValueError("row does not fit in ncols bits")
        self.rows = packed

    @classmethod
    def from_array(cls, array) -> "BitMatrix":
        arr = np.asarray(array, dtype=np.int64) & 1
        if arr.ndim != 2:
            raise ValueError("expected a 2d array")
        m, n = arr.shape
        weights = 1 << np.arange(n, dtype=object)
        rows = [int(np.dot(arr[i].astype(object), weights)) if n else 0 for i in range(m)]
        return cls(m, n, rows)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, [1 << i for i in range(n)])

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.ncols), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            j = 0
            while r:
                if r & 1:
                    out[i, j] = 1
                r >>= 1
                j += 1
        return out

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        return (self.rows[i] >> j) & 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return (self.nrows, self.ncols, self.rows) == (other.nrows, other.ncols, other.rows)

    def __hash__(self) -> int:
        return hash((self.nrows, self.ncols, self.rows))

    def __repr__(self) -> str:
        return f"BitMatrix({self.nrows}x{self.ncols})"

    def row_vector(self, i: int) -> BitVector:
        return BitVector(self.ncols, self.rows[i])

    def matvec(self, x: BitVector | int) -> BitVector:
        bits = x.bits if isinstance(x, BitVector) else x
        out = 0
        for i, r in enumerate(self.rows):
            if _parity(r & bits):
                out |= 1 << i
        return BitVector(self.nrows, out)

    def transpose(self) -> "BitMatrix":
        cols = [0] * self.ncols
        for i, r in enumerate(self.rows):
            j = 0
            while r:
                if r & 1:
                    cols[j] |= 1 << i
                r >>= 1
                j += 1
        return BitMatrix(self.ncols, self.nrows, cols)

    def to_json(self) -> dict:
        return {"rows": self.nrows, "cols": self.ncols, "hex": [format(r, "x") for r in self.rows]}

    @classmethod
    def from_json(cls, data: dict) -> "BitMatrix":
        return cls(int(data["rows"]), int(data["cols"]), [int(h, 16) for h in data["hex"]])


def _as_rows(M: BitMatrix | Sequence[int] | np.ndarray) -> list[int]:
    if isinstance(M, BitMatrix):
        return list(M.rows)
    if isinstance(M, np.ndarray):
        return list(BitMatrix.from_array(M).rows)
    return [int(r) for r in M]


def _echelon(rows: list[int]) -> list[int]:
    """Reduced pivot rows, keyed so that each pivot is the row's lowest set bit."""
    pivots: dict[int, int] = {}
    for r in rows:
        while r:
            low = r & -r
            if low in pivots:
                r ^= pivots[low]
            else:
                pivots[low] = r
                break
    return list(pivots.values())


def gf2_rank(M: BitMatrix | Sequence[int] | np.ndarray) -> int:
    """Rank over F_2 by Gaussian elimination."""
    return len(_echelon(_as_rows(M)))


def gf2_kernel(M: BitMatrix) -> list[BitVector]:
    """A basis of {x : Mx = 0}, built from the reduced row echelon form."""
    n = M.ncols
    pivots: dict[int, int] = {}  # pivot column -> row
    for r in M.rows:
        for col, prow in pivots.items():
            if (r >> col) & 1:
                r ^= prow
        if not r:
            continue
        col = (r & -r).bit_length() - 1
        for c, prow in list(pivots.items()):
            if (prow >> col) & 1:
                pivots[c] = prow ^ r
        pivots[col] = r
    basis = []
    for free in range(n):
        if free in pivots:
            continue
        v = 1 << free
        for col, prow in pivots.items():
            if (prow >> free) & 1:
                v |= 1 << col
        basis.append(BitVector(n, v))
    return basis


def _poly_mulmod(a: int, b: int, poly: int, t: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if (a >> t) & 1:
            a ^= poly
    return out


def _is_irreducible(poly: int, t: int) -> bool:
    # no factor of degree 1..t//2
    for deg in range(1, t // 2 + 1):
        for f in range(1 << deg, 1 << (deg + 1)):
            if _poly_mod(poly, f) == 0:
                return False
    return True


def _poly_mod(a: int, f: int) -> int:
    df = f.bit_length() - 1
    while a and a.bit_length() - 1 >= df:
        a ^= f << (a.bit_length() - 1 - df)
    return a


def smallest_irreducible(t: int) -> int:
    for poly in range(1 << t, 1 << (t + 1)):
        if _is_irreducible(poly, t):
            return poly
    raise AssertionError("no irreducible polynomial found")


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """F_{2^t} with its defining polynomial, tables and a self-dual basis."""

    t: int
    poly: int
    basis: tuple[int, ...]
    exp_table: np.ndarray = field(repr=False)
    log_table: np.ndarray = field(repr=False)
    trace_table: np.ndarray = field(repr=False)
    # row i is the self-dual coordinate vector of the polynomial basis element x^i
    to_dual: tuple[int, ...] = field(repr=False)

    @property
    def q(self) -> int:
        return 1 << self.t

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldSpec):
            return NotImplemented
        return (self.t, self.poly, self.basis) == (other.t, other.poly, other.basis)

    def __hash__(self) -> int:
        return hash((self.t, self.poly, self.basis))

    def element(self, value: int) -> "FieldElement":
        return FieldElement(self, value)

    def elements(self) -> list["FieldElement"]:
        return [FieldElement(self, v) for v in range(self.q)]

    # integer-level arithmetic, used by the code builders
    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp_table[(int(self.log_table[a]) + int(self.log_table[b])) % (self.q - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return int(self.exp_table[(-int(self.log_table[a])) % (self.q - 1)])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def power(self, a: int, e: int) -> int:
        if e == 0:
            return 1
        if a == 0:
            return 0
        return int(self.exp_table[(int(self.log_table[a]) * e) % (self.q - 1)])

    def trace(self, a: int) -> int:
        return int(self.trace_table[a])

    def mul_array(self, a: np.ndarray, b: np.ndarray | int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.broadcast_to(np.asarray(b, dtype=np.int64), a.shape) if np.ndim(b) == 0 else np.asarray(b, dtype=np.int64)
        zero = (a == 0) | (b == 0)
        idx = (self.log_table[a] + self.log_table[b]) % (self.q - 1)
        out = self.exp_table[idx]
        return np.where(zero, 0, out)

    def kappa_bits(self, a: int) -> int:
        out = 0
        i = 0
        while a:
            if a & 1:
                out ^= self.to_dual[i]
            a >>= 1
            i += 1
        return out

    def kappa_inv_bits(self, v: int) -> int:
        out = 0
        i = 0
        while v:
            if v & 1:
                out ^= self.basis[i]
            v >>= 1
            i += 1
        return out

    def to_json(self) -> dict:
        return {"t": self.t, "poly": format(self.poly, "b"), "basis": list(self.basis)}

    @classmethod
    def from_json(cls, data: dict) -> "FieldSpec":
        spec = find_self_dual_basis(int(data["t"]))
        if format(spec.poly, "b") != data["poly"] or list(spec.basis) != list(data["basis"]):
            return _build_spec(int(data["t"]), int(data["poly"], 2), tuple(int(b) for b in data["basis"]))
        return spec


@dataclass(frozen=True)
class FieldElement:
    spec: FieldSpec
    value: int

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.spec.q:
            raise ValueError(f"value {self.value} outside F_{self.spec.q}")

    def _check(self, other: "FieldElement") -> None:
        if other.spec != self.spec:
            raise ValueError("field elements from different fields")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.spec, self.value ^ other.value)

    __sub__ = __add__

    def __neg__(self) -> "FieldElement":
        return self

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        return field_mul(self, other)

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.spec, self.spec.div(self.value, other.value))

    def __pow__(self, e: int) -> "FieldElement":
        if e < 0:
            return FieldElement(self.spec, self.spec.power(self.spec.inv(self.value), -e))
        return FieldElement(self.spec, self.spec.power(self.value, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.spec, self.spec.inv(self.value))

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"F{self.spec.q}({self.value})"


def field_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    if a.spec != b.spec:
        raise ValueError("field elements from different fields")
    return FieldElement(a.spec, a.spec.mul(a.value, b.value))


def field_trace(a: FieldElement) -> int:
    """tr(a) = a + a^2 + ... + a^(2^(t-1)), which lies in F_2."""
    spec = a.spec
    acc = 0
    x = a.value
    for _ in range(spec.t):
        acc ^= x
        x = spec.mul(x, x)
    if acc not in (0, 1):
        raise AssertionError("trace left the prime field")
    return acc


def kappa(a: FieldElement) -> BitVector:
    """Coordinates of a in the self-dual basis."""
    return BitVector(a.spec.t, a.spec.kappa_bits(a.value))


def kappa_inv(v: BitVector, spec: FieldSpec) -> FieldElement:
    if v.length != spec.t:
        raise ValueError(f"expected a length-{spec.t} vector, got {v.length}")
    return FieldElement(spec, spec.kappa_inv_bits(v.bits))


def _tables(t: int, poly: int) -> tuple[np.ndarray, np.ndarray]:
    q = 1 << t
    order = q - 1
    # smallest multiplicative generator
    for g in range(2 if t > 1 else 1, q):
        x, seen = 1, 0
        exp = np.zeros(2 * order if order else 1, dtype=np.int64)
        ok = True
        for i in range(order):
            exp[i] = x
            if x == 1 and i > 0:
                ok = False
                break
            x = _poly_mulmod(x, g, poly, t)
        if ok and x == 1:
            break
    else:
        raise AssertionError("no primitive element")
    log = np.zeros(q, dtype=np.int64)
    for i in range(order):
        log[exp[i]] = i
    exp[order:] = exp[:order]
    return exp, log


def _build_spec(t: int, poly: int, basis: tuple[int, ...] | None) -> FieldSpec:
    q = 1 << t
    exp, log = _tables(t, poly)

    def mul(a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(exp[(log[a] + log[b]) % (q - 1)])

    trace = np.zeros(q, dtype=np.int64)
    for a in range(q):
        acc, x = 0, a
        for _ in range(t):
            acc ^= x
            x = mul(x, x)
        trace[a] = acc
    if basis is None:
        basis = _search_self_dual(t, mul, trace)
    gram_ok = all(trace[mul(bi, bj)] == (i == j) for i, bi in enumerate(basis) for j, bj in enumerate(basis))
    if len(basis) != t or not gram_ok:
        raise ValueError("basis is not self-dual")
    # change of basis: invert the matrix whose columns are the basis vectors
    to_dual = _invert_columns(list(basis), t)
    return FieldSpec(t, poly, tuple(basis), exp, log, trace, tuple(to_dual))


def _invert_columns(basis: list[int], t: int) -> list[int]:
    """Given b_1..b_t (as polynomial-basis bit vectors), return for each x^i its
    coordinates in the b-basis, via Gauss-Jordan on the augmented system."""
    # rows of augmented matrix: for each polynomial coordinate r, the bits of
    # (b_0[r], ..., b_{t-1}[r]) | e_r
    aug = []
    for r in range(t):
        lhs = 0
        for j, b in enumerate(basis):
            if (b >> r) & 1:
                lhs |= 1 << j
        aug.append((lhs, 1 << r))
    for col in range(t):
        piv = next((i for i in range(col, t) if (aug[i][0] >> col) & 1), None)
        if piv is None:
            raise ValueError("basis is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        for i in range(t):
            if i != col and (aug[i][0] >> col) & 1:
                aug[i] = (aug[i][0] ^ aug[col][0], aug[i][1] ^ aug[col][1])
    # now row j: coordinate j of the solution, as a combination of e_r
    # coordinates of x^i = bit j set iff row j's rhs has bit i
    out = []
    for i in range(t):
        v = 0
        for j in range(t):
            if (aug[j][1] >> i) & 1:
                v |= 1 << j
        out.append(v)
    return out


def _search_self_dual(t: int, mul, trace: np.ndarray) -> tuple[int, ...]:
    """Lexicographically first increasing tuple b_1 < ... < b_t with tr(b_i b_j) = delta_ij."""
    q = 1 << t
    # tr(b^2) = tr(b), so unit vectors of the trace form are the trace-one elements
    units = [a for a in range(1, q) if trace[a] == 1]

    def extend(chosen: list[int], start: int) -> list[int] | None:
        if len(chosen) == t:
            return chosen
        for idx in range(start, len(units)):
            b = units[idx]
            if all(trace[mul(b, c)] == 0 for c in chosen):
                found = extend(chosen + [b], idx + 1)
                if found is not None:
                    return found
        return None

    found = extend([], 0)
    if found is None:
        raise AssertionError(f"no self-dual basis found for t={t}")
    return tuple(found)


@lru_cache(maxsize=None)
def find_self_dual_basis(t: int) -> FieldSpec:
    """The canonical F_{2^t}: smallest irreducible polynomial, first self-dual basis."""
    if not 1 <= t <= MAX_FIELD_EXPONENT:
        raise ValueError(f"t must lie in 1..{MAX_FIELD_EXPONENT}, got {t}")
    return _build_spec(t, smallest_irreducible(t), None)
