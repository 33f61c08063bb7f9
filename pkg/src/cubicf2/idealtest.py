"""Smoothness of cubic surfaces over the algebraic closure of F_2.

Two independent routes decide whether f and its four partials have a common
projective zero:

* a weak-Nullstellensatz certificate: on each affine chart v = 1 the
  dehomogenized Jacobian ideal has reduced Groebner basis {1} exactly when
  the system has no solution over the closure;
* a brute-force scan of P^3(GF(2^k)) for k = 1..kmax looking for a common zero.

Groebner bases use grevlex with x > y > z > t, Buchberger's algorithm with the
normal selection strategy and both Buchberger criteria.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .forms import MONOMIALS, QUAD_MONOMIALS, CubicForm, derivative
from .gf2k import FieldSpec, field
from .projspace import enumerate_points

__all__ = [
    "SparsePoly",
    "IdealBasis",
    "SmoothnessVerdict",
    "OracleConflict",
    "grevlex_key",
    "jacobian_ideal",
    "dehomogenize",
    "buchberger",
    "normal_form",
    "is_smooth",
    "singular_point_search",
]

Exp = tuple[int, int, int, int]


def grevlex_key(e: Exp):
    return (sum(e), tuple(-x for x in reversed(e)))


class SparsePoly:
    """Polynomial in x, y, z, t as ``{exponent tuple: nonzero coefficient}``."""

    __slots__ = ("terms", "spec", "_lm")

    def __init__(self, terms: dict, spec: FieldSpec):
        self.terms = {tuple(e): int(c) for e, c in terms.items() if c}
        self.spec = spec
        self._lm = None

    @classmethod
    def constant(cls, c: int, spec: FieldSpec) -> SparsePoly:
        return cls({(0, 0, 0, 0): c}, spec)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, SparsePoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    @property
    def lm(self) -> Exp:
        if self._lm is None:
            self._lm = max(self.terms, key=grevlex_key)
        return self._lm

    @property
    def lc(self) -> int:
        return self.terms[self.lm]

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def monic(self) -> SparsePoly:
        s = self.spec.inv(self.lc)
        return SparsePoly({e: self.spec.mul(s, c) for e, c in self.terms.items()}, self.spec)

    def is_one(self) -> bool:
        return self.terms == {(0, 0, 0, 0): 1}

    def __add__(self, other: SparsePoly) -> SparsePoly:
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) ^ c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return SparsePoly(out, self.spec)

    def __mul__(self, other: SparsePoly) -> SparsePoly:
        mul = self.spec.mul
        out: dict = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = (ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3])
                v = out.get(e, 0) ^ mul(ca, cb)
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return SparsePoly(out, self.spec)

    def sorted_terms(self) -> list[tuple[Exp, int]]:
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                (v if k == 1 else f"{v}^{k}") for v, k in zip("xyzt", e) if k
            ) or "1"
            parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts)


@dataclass
class IdealBasis:
    gens: list[SparsePoly]
    order: str = "grevlex(x>y>z>t)"


@dataclass
class SmoothnessVerdict:
    smooth: bool
    witness: tuple[int, tuple[int, ...]] | None
    certificate: str

    def as_json(self) -> dict:
        out = {"smooth": self.smooth, "certificate": self.certificate, "witness": None}
        if self.witness is not None:
            k, coords = self.witness
            out["witness"] = {"k": k, "point": list(coords)}
        return out


class OracleConflict(RuntimeError):
    """The Groebner certificate and the point search disagree."""


def _quad_poly(coeffs, spec) -> SparsePoly:
    return SparsePoly({QUAD_MONOMIALS[i]: c for i, c in enumerate(coeffs) if c}, spec)


def jacobian_ideal(f: CubicForm) -> IdealBasis:
    """{f, f_x, f_y, f_z, f_t}; f is implied by Euler's identity but kept."""
    if f.is_zero():
        raise ValueError("the zero form defines no surface")
    spec = f.spec
    gens = [SparsePoly(f.terms(), spec)]
    gens += [_quad_poly(derivative(f, v), spec) for v in range(4)]
    return IdealBasis(gens)


def dehomogenize(p: SparsePoly, v: int) -> SparsePoly:
    out: dict = {}
    for e, c in p.terms.items():
        d = list(e)
        d[v] = 0
        d = tuple(d)
        val = out.get(d, 0) ^ c
        if val:
            out[d] = val
        else:
            out.pop(d, None)
    return SparsePoly(out, p.spec)


def _divides(a: Exp, b: Exp) -> bool:
    return a[0] <= b[0] and a[1] <= b[1] and a[2] <= b[2] and a[3] <= b[3]


def _lcm(a: Exp, b: Exp) -> Exp:
    return (max(a[0], b[0]), max(a[1], b[1]), max(a[2], b[2]), max(a[3], b[3]))


def _sub(a: Exp, b: Exp) -> Exp:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3])


def _coprime(a: Exp, b: Exp) -> bool:
    return all(x == 0 or y == 0 for x, y in zip(a, b))


def normal_form(f: SparsePoly, basis: list[SparsePoly]) -> SparsePoly:
    """Complete reduction of f by ``basis`` (every term, not only the leading one)."""
    spec = f.spec
    mul, inv = spec.mul, spec.inv
    work = dict(f.terms)
    rem: dict = {}
    divisors = [(g.lm, g) for g in basis if g]
    while work:
        lm = max(work, key=grevlex_key)
        c = work[lm]
        for glm, g in divisors:
            if _divides(glm, lm):
                shift = _sub(lm, glm)
                s = mul(c, inv(g.lc))
                for e, gc in g.terms.items():
                    m = (e[0] + shift[0], e[1] + shift[1], e[2] + shift[2], e[3] + shift[3])
                    v = work.get(m, 0) ^ mul(s, gc)
                    if v:
                        work[m] = v
                    else:
                        work.pop(m, None)
                break
        else:
            rem[lm] = c
            del work[lm]
    return SparsePoly(rem, spec)


def _spoly(f: SparsePoly, g: SparsePoly) -> SparsePoly:
    spec = f.spec
    lcm = _lcm(f.lm, g.lm)
    a = SparsePoly({_sub(lcm, f.lm): spec.inv(f.lc)}, spec)
    b = SparsePoly({_sub(lcm, g.lm): spec.inv(g.lc)}, spec)
    return a * f + b * g


def _reduce_basis(basis: list[SparsePoly]) -> list[SparsePoly]:
    basis = [g.monic() for g in basis if g]
    minimal = []
    for g in sorted(basis, key=lambda p: grevlex_key(p.lm)):
        if not any(_divides(h.lm, g.lm) for h in minimal):
            minimal.append(g)
    reduced = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        reduced.append(normal_form(g, others).monic())
    return sorted(reduced, key=lambda p: grevlex_key(p.lm), reverse=True)


def buchberger(ideal: IdealBasis | list[SparsePoly]) -> IdealBasis:
    """Reduced Groebner basis, sorted by descending leading monomial."""
    polys = ideal.gens if isinstance(ideal, IdealBasis) else list(ideal)
    polys = [p for p in polys if p]
    if not polys:
        return IdealBasis([])
    spec = polys[0].spec
    basis: list[SparsePoly] = []
    pairs: set[tuple[int, int]] = set()

    def add(p: SparsePoly) -> None:
        basis.append(p.monic())
        j = len(basis) - 1
        for i in range(j):
            pairs.add((i, j))

    for p in polys:
        r = normal_form(p, basis)
        if r:
            add(r)
    while pairs:
        if any(g.lm == (0, 0, 0, 0) for g in basis):
            break
        # normal strategy: smallest lcm first, index tie-break for determinism
        i, j = min(pairs, key=lambda ij: (grevlex_key(_lcm(basis[ij[0]].lm, basis[ij[1]].lm)), ij))
        pairs.discard((i, j))
        lmi, lmj = basis[i].lm, basis[j].lm
        if _coprime(lmi, lmj):
            continue
        lcm = _lcm(lmi, lmj)
        if any(
            k not in (i, j)
            and _divides(basis[k].lm, lcm)
            and (min(i, k), max(i, k)) not in pairs
            and (min(j, k), max(j, k)) not in pairs
            for k in range(len(basis))
        ):
            continue
        r = normal_form(_spoly(basis[i], basis[j]), basis)
        if r:
            add(r)
    if any(g.lm == (0, 0, 0, 0) for g in basis):
        return IdealBasis([SparsePoly.constant(1, spec)])
    return IdealBasis(_reduce_basis(basis))


# -- point search ------------------------------------------------------

@lru_cache(maxsize=None)
def _search_tables(k: int):
    """Points of P^3(GF(2^k)) with the values of every cubic and quadratic monomial."""
    spec = field(k)
    pts = np.array([p.coords for p in enumerate_points(3, spec)], dtype=np.int64)
    powers = np.array([[spec.pow(a, e) for a in range(spec.q)] for e in range(4)], dtype=np.int64)
    t = spec.mul_table.astype(np.int64)

    def values(mons):
        out = np.empty((len(pts), len(mons)), dtype=np.int64)
        for i, e in enumerate(mons):
            v = np.ones(len(pts), dtype=np.int64)
            for j in range(4):
                v = t[v, powers[e[j], pts[:, j]]]
            out[:, i] = v
        return out

    return pts, values(MONOMIALS), values(QUAD_MONOMIALS)


def singular_point_search(f: CubicForm, kmax: int = 4):
    """First common zero of f and its partials in P^3(GF(2^k)), k = 1..kmax."""
    if f.spec.q != 2:
        raise ValueError("the point search takes forms over F_2")
    cubic = np.array(f.coeffs, dtype=bool)
    partials = [np.array(derivative(f, v), dtype=bool) for v in range(4)]
    for k in range(1, kmax + 1):
        pts, cvals, qvals = _search_tables(k)
        # F_2 coefficients are 0/1, so each value is an XOR of monomial values
        zero = np.bitwise_xor.reduce(cvals[:, cubic], axis=1) == 0 if cubic.any() else np.ones(len(pts), bool)
        for d in partials:
            if d.any():
                zero &= np.bitwise_xor.reduce(qvals[:, d], axis=1) == 0
        hits = np.flatnonzero(zero)
        if len(hits):
            return k, tuple(int(c) for c in pts[hits[0]])
    return None


def _groebner_smooth(f: CubicForm) -> bool:
    ideal = jacobian_ideal(f)
    for v in range(4):
        chart = [dehomogenize(g, v) for g in ideal.gens]
        gb = buchberger(chart)
        if not (len(gb.gens) == 1 and gb.gens[0].is_one()):
            return False
    return True


def is_smooth(f: CubicForm, method: str = "both", kmax: int = 4) -> SmoothnessVerdict:
    if f.is_zero():
        raise ValueError("the zero form defines no surface")
    if method not in ("groebner", "search", "both"):
        raise ValueError(f"unknown method {method!r}")
    witness = singular_point_search(f, kmax) if method in ("search", "both") else None
    if method == "search":
        return SmoothnessVerdict(witness is None, witness, "search")
    smooth = _groebner_smooth(f)
    if method == "both" and witness is not None and smooth:
        raise OracleConflict(f"Groebner says {f.hex()} is smooth but {witness} is singular")
    return SmoothnessVerdict(smooth, witness, method)
