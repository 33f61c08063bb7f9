"""Arithmetic in GF(2^k), 1 <= k <= 8, and small dense matrices over it.

Elements are plain ints (the bit pattern of the residue polynomial); a
:class:`FieldSpec` owns the log/antilog tables and answers every operation.
:class:`FieldElement` is a thin operator-overloading wrapper for callers that
want ``a * b`` syntax.  Matrix routines work on numpy ``uint8`` arrays and
broadcast over leading batch axes, which is what the group code relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "MODULI",
    "FieldSpec",
    "FieldElement",
    "Matrix",
    "NotInvertible",
    "field",
    "add",
    "mul",
    "invert",
    "matmul",
    "rank",
    "rref",
]

# k -> modulus.  k = 1 uses x + 1 as a sentinel (GF(2) itself); for k >= 4 the
# entry is the numerically smallest primitive polynomial of degree k.
MODULI = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0b100011101,
}


class NotInvertible(ArithmeticError):
    """Raised by :func:`invert` for a singular matrix."""


def _polymod(a: int, m: int) -> int:
    dm = m.bit_length() - 1
    while a and a.bit_length() - 1 >= dm:
        a ^= m << (a.bit_length() - 1 - dm)
    return a


def _is_irreducible(m: int) -> bool:
    """Trial division by every polynomial of degree 1..deg(m)//2."""
    d = m.bit_length() - 1
    for p in range(2, 1 << (d // 2 + 1)):
        if _polymod(m, p) == 0:
            return False
    return True


class FieldSpec:
    """The field GF(2^k) with the fixed modulus from :data:`MODULI`."""

    def __init__(self, k: int):
        if not 1 <= k <= 8:
            raise ValueError(f"extension degree must be in 1..8, got {k}")
        self.k = k
        self.modulus = MODULI[k]
        self.q = 1 << k
        if not _is_irreducible(self.modulus):
            raise ValueError(f"modulus {self.modulus:#b} is reducible")
        q = self.q
        exp = np.zeros(2 * (q - 1), dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        a = 1
        for i in range(q - 1):
            exp[i] = a
            if log[a] >= 0:
                raise ValueError(f"modulus {self.modulus:#b} is not primitive")
            log[a] = i
            # multiply by x (in GF(2), x == 1 mod x + 1)
            a = _polymod(a << 1, self.modulus)
        exp[q - 1:] = exp[: q - 1]
        self.exp = exp
        self.log = log

        la = log[:, None]
        lb = log[None, :]
        table = exp[np.where((la >= 0) & (lb >= 0), la + lb, 0)]
        table[(la < 0) | (lb < 0)] = 0
        self.mul_table = table.astype(np.uint8)
        self.mul_table.setflags(write=False)
        inv = np.zeros(q, dtype=np.uint8)
        inv[1:] = exp[(q - 1 - log[1:]) % (q - 1)]
        self.inv_table = inv
        self.inv_table.setflags(write=False)
        # python-level copies for scalar hot loops
        self._mul = [list(map(int, row)) for row in self.mul_table]
        self._inv = list(map(int, inv))

    def __repr__(self) -> str:
        return f"FieldSpec(k={self.k}, modulus={self.modulus:#b})"

    def __reduce__(self):
        return (field, (self.k,))

    def elements(self) -> range:
        return range(self.q)

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self._inv[a]

    def pow(self, a: int, e: int) -> int:
        if e == 0:
            return 1
        if a == 0:
            return 0
        return int(self.exp[(int(self.log[a]) * e) % (self.q - 1)])

    def element(self, bits: int) -> FieldElement:
        return FieldElement(bits, self)


@lru_cache(maxsize=None)
def field(k: int) -> FieldSpec:
    """Shared :class:`FieldSpec` instance for GF(2^k)."""
    return FieldSpec(k)


@dataclass(frozen=True)
class FieldElement:
    bits: int
    spec: FieldSpec

    def __post_init__(self):
        if not 0 <= self.bits < self.spec.q:
            raise ValueError(f"{self.bits} is not an element of GF({self.spec.q})")

    def _check(self, other: FieldElement) -> None:
        if other.spec is not self.spec:
            raise ValueError("field elements from different fields")

    def __add__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return FieldElement(self.bits ^ other.bits, self.spec)

    __sub__ = __add__

    def __mul__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return FieldElement(self.spec.mul(self.bits, other.bits), self.spec)

    def __pow__(self, e: int) -> FieldElement:
        return FieldElement(self.spec.pow(self.bits, e), self.spec)

    def inverse(self) -> FieldElement:
        return FieldElement(self.spec.inv(self.bits), self.spec)

    def __bool__(self) -> bool:
        return self.bits != 0

    def __int__(self) -> int:
        return self.bits


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def matmul(spec: FieldSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of square matrices over ``spec``; broadcasts over batch axes."""
    a = np.asarray(a, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8)
    n = a.shape[-1]
    t = spec.mul_table
    out = t[a[..., :, 0, None], b[..., None, 0, :]]
    for k in range(1, n):
        out = out ^ t[a[..., :, k, None], b[..., None, k, :]]
    return out


def rref(spec: FieldSpec, rows) -> np.ndarray:
    """Reduced row-echelon form with zero rows dropped."""
    m = np.array(rows, dtype=np.uint8, copy=True)
    if m.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    t = spec.mul_table
    nrows, ncols = m.shape
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if m[i, c]), None)
        if piv is None:
            continue
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = t[spec.inv_table[m[r, c]], m[r]]
        for i in range(nrows):
            if i != r and m[i, c]:
                m[i] ^= t[m[i, c], m[r]]
        r += 1
    return m[:r]


def rank(spec: FieldSpec, rows) -> int:
    return len(rref(spec, rows))


@dataclass(frozen=True, eq=False)
class Matrix:
    """Square matrix over ``spec`` stored as an ``n x n`` uint8 array."""

    entries: np.ndarray
    spec: FieldSpec

    def __post_init__(self):
        e = np.array(self.entries, dtype=np.uint8)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {e.shape}")
        if e.size and int(e.max()) >= self.spec.q:
            raise ValueError("entry outside the field")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @classmethod
    def identity(cls, n: int, spec: FieldSpec) -> Matrix:
        return cls(np.eye(n, dtype=np.uint8), spec)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other: Matrix) -> Matrix:
        if other.spec is not self.spec:
            raise ValueError("matrices over different fields")
        return Matrix(matmul(self.spec, self.entries, other.entries), self.spec)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and other.spec is self.spec
            and np.array_equal(self.entries, other.entries)
        )

    def __hash__(self) -> int:
        return hash((self.spec.k, self.entries.tobytes()))

    def transpose(self) -> Matrix:
        return Matrix(self.entries.T, self.spec)

    def apply(self, v) -> tuple[int, ...]:
        """Matrix times column vector."""
        t = self.spec._mul
        return tuple(
            _xor_all(t[int(a)][int(b)] for a, b in zip(row, v)) for row in self.entries
        )

    def to_bytes(self) -> bytes:
        return self.entries.tobytes()

    def hex(self) -> str:
        return self.entries.tobytes().hex()

    def __repr__(self) -> str:
        return f"Matrix({self.entries.tolist()}, GF({self.spec.q}))"


def _xor_all(it) -> int:
    acc = 0
    for v in it:
        acc ^= v
    return acc


def invert(m: Matrix) -> Matrix:
    """Gauss-Jordan inverse; raises :class:`NotInvertible` when singular."""
    spec = m.spec
    n = m.n
    aug = np.concatenate([m.entries, np.eye(n, dtype=np.uint8)], axis=1)
    red = rref(spec, aug)
    if len(red) < n or not np.array_equal(red[:, :n], np.eye(n, dtype=np.uint8)):
        raise NotInvertible("matrix is singular")
    return Matrix(red[:, n:], spec)
