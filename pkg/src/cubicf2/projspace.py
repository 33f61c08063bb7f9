"""Points and lines of P^n(F_q) in canonical form."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product

import numpy as np

from .gf2k import FieldSpec, rank, rref

__all__ = [
    "ProjPoint",
    "ProjLine",
    "normalize",
    "enumerate_points",
    "enumerate_lines",
    "line_through",
    "are_skew",
    "points_on_line",
    "LINE_XY",
    "LINE_ZT",
]


@dataclass(frozen=True, order=True)
class ProjPoint:
    coords: tuple[int, ...]

    def __iter__(self):
        return iter(self.coords)

    def __len__(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class ProjLine:
    """A line of P^3 given by the reduced row-echelon basis of its 2-d subspace."""

    basis: tuple[tuple[int, ...], tuple[int, ...]]

    def to_bytes(self) -> bytes:
        return bytes(self.basis[0] + self.basis[1])


def normalize(coords, spec: FieldSpec) -> ProjPoint:
    """Scale so the first nonzero coordinate is 1."""
    coords = tuple(int(c) for c in coords)
    lead = next((c for c in coords if c), 0)
    if lead == 0:
        raise ValueError("the zero vector is not a projective point")
    if lead == 1:
        return ProjPoint(coords)
    s = spec.inv(lead)
    return ProjPoint(tuple(spec.mul(s, c) for c in coords))


@lru_cache(maxsize=None)
def _points(n: int, spec: FieldSpec) -> tuple[ProjPoint, ...]:
    q = spec.q
    pts = []
    for lead in range(n + 1):
        for tail in product(range(q), repeat=n - lead):
            pts.append(ProjPoint((0,) * lead + (1,) + tail))
    pts.sort()
    return tuple(pts)


def enumerate_points(n: int, spec: FieldSpec) -> list[ProjPoint]:
    """All points of P^n(F_q), sorted lexicographically."""
    if not 1 <= n <= 3:
        raise ValueError("only 1 <= n <= 3 is supported")
    return list(_points(n, spec))


def line_through(rows, spec: FieldSpec) -> ProjLine:
    """The line spanned by two independent vectors of F_q^4."""
    red = rref(spec, rows)
    if len(red) != 2:
        raise ValueError("vectors do not span a line")
    return ProjLine((tuple(map(int, red[0])), tuple(map(int, red[1]))))


@lru_cache(maxsize=None)
def _lines(spec: FieldSpec) -> tuple[ProjLine, ...]:
    # walk the echelon shapes directly: pivots c1 < c2, free entries right of
    # each pivot except in the other pivot column
    q = spec.q
    out = []
    for c1, c2 in combinations(range(4), 2):
        free0 = [c for c in range(c1 + 1, 4) if c != c2]
        free1 = list(range(c2 + 1, 4))
        for vals0 in product(range(q), repeat=len(free0)):
            r0 = [0, 0, 0, 0]
            r0[c1] = 1
            for c, v in zip(free0, vals0):
                r0[c] = v
            for vals1 in product(range(q), repeat=len(free1)):
                r1 = [0, 0, 0, 0]
                r1[c2] = 1
                for c, v in zip(free1, vals1):
                    r1[c] = v
                out.append(ProjLine((tuple(r0), tuple(r1))))
    return tuple(sorted(out, key=ProjLine.to_bytes))


def enumerate_lines(spec: FieldSpec) -> list[ProjLine]:
    """All lines of P^3(F_q), sorted by the bytes of their echelon basis."""
    if spec.q > 8:
        raise ValueError("line enumeration is limited to q <= 8")
    return list(_lines(spec))


def are_skew(a: ProjLine, b: ProjLine, spec: FieldSpec) -> bool:
    return rank(spec, list(a.basis) + list(b.basis)) == 4


def points_on_line(line: ProjLine, spec: FieldSpec) -> list[ProjPoint]:
    u, v = (np.array(r, dtype=np.uint8) for r in line.basis)
    t = spec.mul_table
    pts = {normalize(t[a, u] ^ t[b, v], spec) for a in range(spec.q) for b in range(spec.q) if a or b}
    return sorted(pts)


# x = y = 0 and z = t = 0, the two skew lines on the S6-invariant cubic
LINE_XY = ProjLine(((0, 0, 1, 0), (0, 0, 0, 1)))
LINE_ZT = ProjLine(((1, 0, 0, 0), (0, 1, 0, 0)))
