"""Cubic forms in x, y, z, t over GF(2^k).

A form is a vector of 20 coefficients indexed by :data:`MONOMIALS` (exponent
tuples of degree 3, lexicographically descending, so index 0 is x^3 and index
19 is t^3).  Over F_2 a form is also a 20-bit word, bit i being the
coefficient of monomial i; the hex encoding used on the command line is that
word printed as 5 hex digits.

Action convention: ``act(g, f)(v) = f(g v)`` for column vectors v, hence
``act(g, act(h, f)) == act(h @ g, f)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .gf2k import FieldSpec, Matrix, field, rank
from .projspace import ProjLine, ProjPoint, enumerate_points

__all__ = [
    "contains_line",
    "paper_form_1",
    "MONOMIALS",
    "QUAD_MONOMIALS",
    "VARIABLES",
    "CubicForm",
    "PencilCubic",
    "evaluate",
    "act",
    "derivative",
    "times_variable",
    "s6_form",
    "fermat_form",
    "vanishing_family_form",
    "pencil_cubic",
    "action_columns",
    "apply_columns",
    "point_masks",
    "vanishing_matrix",
    "FAMILY_BASIS",
]

VARIABLES = "xyzt"


def _monomials(deg: int) -> tuple[tuple[int, int, int, int], ...]:
    mons = [e for e in product(range(deg + 1), repeat=4) if sum(e) == deg]
    return tuple(sorted(mons, reverse=True))


MONOMIALS = _monomials(3)
QUAD_MONOMIALS = _monomials(2)
MONOMIAL_INDEX = {m: i for i, m in enumerate(MONOMIALS)}
QUAD_INDEX = {m: i for i, m in enumerate(QUAD_MONOMIALS)}


def _fmt_monomial(e) -> str:
    parts = []
    for v, k in zip(VARIABLES, e):
        if k == 1:
            parts.append(v)
        elif k > 1:
            parts.append(f"{v}^{k}")
    return "*".join(parts) or "1"


@dataclass(frozen=True)
class CubicForm:
    coeffs: tuple[int, ...]
    spec: FieldSpec

    def __post_init__(self):
        c = tuple(int(v) for v in self.coeffs)
        if len(c) != 20:
            raise ValueError("a cubic form has 20 coefficients")
        if any(not 0 <= v < self.spec.q for v in c):
            raise ValueError("coefficient outside the field")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_terms(cls, terms: dict, spec: FieldSpec | None = None) -> CubicForm:
        """Build from ``{exponent tuple: coefficient}``; repeated terms add."""
        spec = spec or field(1)
        c = [0] * 20
        for e, v in terms.items():
            c[MONOMIAL_INDEX[tuple(e)]] ^= v
        return cls(tuple(c), spec)

    @classmethod
    def from_word(cls, word: int) -> CubicForm:
        if not 0 <= word < 1 << 20:
            raise ValueError("F_2 cubic words are 20-bit")
        return cls(tuple((word >> i) & 1 for i in range(20)), field(1))

    @classmethod
    def from_hex(cls, text: str) -> CubicForm:
        return cls.from_word(int(text, 16))

    @property
    def word(self) -> int:
        if self.spec.q != 2:
            raise ValueError("only F_2 forms have a word encoding")
        return sum(c << i for i, c in enumerate(self.coeffs))

    def hex(self) -> str:
        return f"{self.word:05x}"

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def terms(self) -> dict:
        return {MONOMIALS[i]: c for i, c in enumerate(self.coeffs) if c}

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        out = []
        for i, c in enumerate(self.coeffs):
            if c:
                m = _fmt_monomial(MONOMIALS[i])
                out.append(m if c == 1 else f"{c}*{m}")
        return " + ".join(out)


@dataclass(frozen=True)
class PencilCubic:
    line: ProjLine
    form: CubicForm


def _monomial_value(e, coords, spec: FieldSpec) -> int:
    v = 1
    for c, k in zip(coords, e):
        if k:
            v = spec.mul(v, spec.pow(c, k))
    return v


def evaluate(f: CubicForm, p: ProjPoint | tuple) -> int:
    """Value of ``f`` at the given coordinates (pass a normalized point)."""
    spec = f.spec
    coords = p.coords if isinstance(p, ProjPoint) else tuple(p)
    acc = 0
    for i, c in enumerate(f.coeffs):
        if c:
            acc ^= spec.mul(c, _monomial_value(MONOMIALS[i], coords, spec))
    return acc


# -- sparse polynomial helpers (exponent tuple -> coefficient) -------------

def _pmul(a: dict, b: dict, spec: FieldSpec) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = out.get(e, 0) ^ spec.mul(ca, cb)
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


def _linear(row) -> dict:
    out = {}
    for j, c in enumerate(row):
        if c:
            e = [0, 0, 0, 0]
            e[j] = 1
            out[tuple(e)] = int(c)
    return out


def act(g: Matrix, f: CubicForm) -> CubicForm:
    """The form v -> f(g v)."""
    if g.n != 4 or g.spec is not f.spec:
        raise ValueError("act needs a 4x4 matrix over the form's field")
    spec = f.spec
    if rank(spec, g.entries) != 4:
        raise ValueError("act needs an invertible matrix")
    return CubicForm(_substitute(g.entries, f), spec)


def _substitute(entries, f: CubicForm) -> tuple[int, ...]:
    """Coefficients of f(M v) for any 4x4 array M (no invertibility needed)."""
    spec = f.spec
    rows = [_linear(r) for r in entries]
    # cache products of substituted variables per call
    cache: dict = {}

    def image(e) -> dict:
        if e not in cache:
            poly = {(0, 0, 0, 0): 1}
            for j, k in enumerate(e):
                for _ in range(k):
                    poly = _pmul(poly, rows[j], spec)
            cache[e] = poly
        return cache[e]

    c = [0] * 20
    for i, coef in enumerate(f.coeffs):
        if coef:
            for e, v in image(MONOMIALS[i]).items():
                c[MONOMIAL_INDEX[e]] ^= spec.mul(coef, v)
    return tuple(c)


def contains_line(f: CubicForm, line) -> bool:
    """True when f vanishes identically on the line spanned by two points.

    Substitutes x_j -> s u_j + t v_j; the restriction is a binary cubic in
    (s, t), which must be the zero polynomial.
    """
    basis = getattr(line, "basis", line)
    u, v = (tuple(int(c) for c in b) for b in basis)
    m = [[u[j], v[j], 0, 0] for j in range(4)]
    return not any(_substitute(m, f))


def derivative(f: CubicForm, v: int | str) -> tuple[int, ...]:
    """Formal partial derivative, as 10 coefficients over QUAD_MONOMIALS."""
    j = VARIABLES.index(v) if isinstance(v, str) else v
    out = [0] * 10
    for i, c in enumerate(f.coeffs):
        e = MONOMIALS[i]
        # coefficient e_j reduced mod 2
        if c and e[j] % 2 == 1:
            d = list(e)
            d[j] -= 1
            out[QUAD_INDEX[tuple(d)]] ^= c
    return tuple(out)


def times_variable(quad, v: int | str, spec: FieldSpec) -> CubicForm:
    """Multiply a quadratic coefficient vector by one variable."""
    j = VARIABLES.index(v) if isinstance(v, str) else v
    c = [0] * 20
    for i, coef in enumerate(quad):
        if coef:
            e = list(QUAD_MONOMIALS[i])
            e[j] += 1
            c[MONOMIAL_INDEX[tuple(e)]] ^= coef
    return CubicForm(tuple(c), spec)


def s6_form(spec: FieldSpec | None = None) -> CubicForm:
    """x^2 t + y^2 z + z^2 y + t^2 x."""
    return CubicForm.from_terms(
        {(2, 0, 0, 1): 1, (0, 2, 1, 0): 1, (0, 1, 2, 0): 1, (1, 0, 0, 2): 1}, spec
    )


def fermat_form(spec: FieldSpec | None = None) -> CubicForm:
    return CubicForm.from_terms(
        {(3, 0, 0, 0): 1, (0, 3, 0, 0): 1, (0, 0, 3, 0): 1, (0, 0, 0, 3): 1}, spec
    )


def _uv(u: int, v: int) -> CubicForm:
    # u v (u + v) = u^2 v + u v^2
    e1 = [0, 0, 0, 0]
    e2 = [0, 0, 0, 0]
    e1[u], e1[v] = 2, 1
    e2[u], e2[v] = 1, 2
    return CubicForm.from_terms({tuple(e1): 1, tuple(e2): 1})


# xy(x+y), xz(x+z), xt(x+t), yz(y+z), yt(y+t), zt(z+t)
FAMILY_BASIS = tuple(_uv(u, v) for u in range(4) for v in range(u + 1, 4))


def vanishing_family_form(a) -> CubicForm:
    """Member of the 6-parameter family of F_2 cubics through all 15 points.

    ``a`` is a sequence of six bits (a1..a6) or an int whose bit i is a_{i+1}.
    """
    bits = [(a >> i) & 1 for i in range(6)] if isinstance(a, int) else list(a)
    if len(bits) != 6 or any(b not in (0, 1) for b in bits):
        raise ValueError("family parameters are six bits")
    if not any(bits):
        raise ValueError("the zero parameter vector gives no surface")
    word = 0
    for b, f in zip(bits, FAMILY_BASIS):
        if b:
            word ^= f.word
    return CubicForm.from_word(word)


def pencil_cubic(line: ProjLine) -> PencilCubic:
    """Product of the three F_2-planes containing ``line``."""
    spec = field(1)
    hyperplanes = [
        h
        for h in product((0, 1), repeat=4)
        if any(h)
        and all(sum(a * b for a, b in zip(h, r)) % 2 == 0 for r in line.basis)
    ]
    if len(hyperplanes) != 3:
        raise ValueError("not an F_2 line")
    poly = {(0, 0, 0, 0): 1}
    for h in hyperplanes:
        poly = _pmul(poly, _linear(h), spec)
    return PencilCubic(line, CubicForm.from_terms(poly, spec))


# -- vectorized F_2 machinery ---------------------------------------------

@lru_cache(maxsize=None)
def _scatter() -> tuple[np.ndarray, np.ndarray]:
    """(64 x 20) map from ordered variable triples to cubic monomials, and the
    triple of variable indices behind each monomial."""
    s = np.zeros((64, 20), dtype=np.int64)
    for k1, k2, k3 in product(range(4), repeat=3):
        e = [0, 0, 0, 0]
        for k in (k1, k2, k3):
            e[k] += 1
        s[16 * k1 + 4 * k2 + k3, MONOMIAL_INDEX[tuple(e)]] = 1
    triples = np.array(
        [[j for j in range(4) for _ in range(e[j])] for e in MONOMIALS], dtype=np.int64
    )
    return s, triples


def action_columns(mats: np.ndarray, chunk: int = 4096) -> np.ndarray:
    """Coefficient-space action of F_2 matrices, as 20-bit column words.

    ``mats`` has shape (N, 4, 4) with 0/1 entries.  Entry ``[n, i]`` of the
    result is the word of ``act(mats[n], monomial i)``, so the image of a
    form is the XOR of the columns selected by its bits.
    """
    mats = np.asarray(mats, dtype=np.int64).reshape(-1, 4, 4)
    s, triples = _scatter()
    weights = np.int64(1) << np.arange(20, dtype=np.int64)
    out = np.empty((len(mats), 20), dtype=np.uint32)
    for lo in range(0, len(mats), chunk):
        g = mats[lo: lo + chunk]
        for i, (j1, j2, j3) in enumerate(triples):
            t = np.einsum("na,nb,nc->nabc", g[:, j1], g[:, j2], g[:, j3])
            coeffs = (t.reshape(len(g), 64) @ s) & 1
            out[lo: lo + chunk, i] = coeffs @ weights
    return out


def apply_columns(cols: np.ndarray, words: np.ndarray) -> np.ndarray:
    """Images of F_2 form words under one matrix given by its 20 columns."""
    words = np.asarray(words, dtype=np.uint32)
    out = np.zeros_like(words)
    for i in range(20):
        out ^= ((words >> np.uint32(i)) & np.uint32(1)) * np.uint32(cols[i])
    return out


@lru_cache(maxsize=None)
def point_masks() -> np.ndarray:
    """For each of the 15 points of P^3(F_2), the 20-bit mask of monomials
    that are nonzero there; a form vanishes at p iff popcount(f & mask) is even."""
    spec = field(1)
    masks = []
    for p in enumerate_points(3, spec):
        m = 0
        for i, e in enumerate(MONOMIALS):
            if _monomial_value(e, p.coords, spec):
                m |= 1 << i
        masks.append(m)
    arr = np.array(masks, dtype=np.uint32)
    arr.setflags(write=False)
    return arr


def vanishing_matrix(words: np.ndarray) -> np.ndarray:
    """Boolean (len(words), 15): does form w vanish at point p."""
    words = np.asarray(words, dtype=np.uint32)
    masks = point_masks()
    return (np.bitwise_count(words[:, None] & masks[None, :]) & 1) == 0


paper_form_1 = s6_form
