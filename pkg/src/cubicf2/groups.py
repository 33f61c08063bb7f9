"""Fully materialized finite groups: PGL_n(F_q) subgroups and permutation groups.

A :class:`FiniteGroup` is a table of element codes (one uint8 row per element,
identity first) plus a sorted key index, so every group operation can be
phrased as "compose a batch of codes, look the results up".  Right
multiplication and conjugation by a fixed element then become index
permutations, and subgroup closures, conjugacy classes and normal closures
are breadth-first searches over those permutations.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field as dc_field
from itertools import combinations

import numpy as np

from .gf2k import FieldSpec, Matrix, NotInvertible, field, matmul, rank
from .unionfind import component_labels

__all__ = [
    "LimitExceeded",
    "ClassLimitExceeded",
    "PglDomain",
    "PermDomain",
    "PglElement",
    "FiniteGroup",
    "ConjugacyClasses",
    "NormalSubgroupLattice",
    "closure",
    "gl_generators",
    "pgl",
    "symplectic_group",
    "stabilizer",
    "subgroup",
    "generate",
    "conjugacy_classes",
    "normal_subgroups",
    "min_index_normal_abelian",
    "OMEGA",
    "verify_normal",
    "pgl_order",
    "stabilizer_mask",
]

_CHUNK = 1 << 20


class LimitExceeded(RuntimeError):
    pass


class ClassLimitExceeded(RuntimeError):
    pass


class PglDomain:
    """Scalar-normalized invertible n x n matrices over GF(2^k), flattened."""

    def __init__(self, n: int, spec: FieldSpec):
        self.n = n
        self.spec = spec
        self.width = n * n
        self.bits = n * n * spec.k
        if self.bits > 63:
            raise ValueError("element keys must fit in 63 bits")
        self._shifts = (np.arange(self.width, dtype=np.int64) * spec.k)

    def __repr__(self) -> str:
        return f"PGL({self.n}, {self.spec.q})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PglDomain) and (other.n, other.spec.k) == (self.n, self.spec.k)

    def __hash__(self) -> int:
        return hash(("pgl", self.n, self.spec.k))

    def identity(self) -> np.ndarray:
        return np.eye(self.n, dtype=np.uint8).reshape(self.width)

    def normalize(self, flat: np.ndarray) -> np.ndarray:
        """Scale each row so its first nonzero entry is 1."""
        if self.spec.q == 2:
            return flat
        lead_pos = np.argmax(flat != 0, axis=1)
        lead = flat[np.arange(len(flat)), lead_pos]
        scale = self.spec.inv_table[lead]
        return self.spec.mul_table[scale[:, None], flat]

    def compose(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        n = self.n
        prod = matmul(self.spec, a.reshape(-1, n, n), b.reshape(-1, n, n))
        return self.normalize(prod.reshape(-1, self.width))

    def keys(self, codes: np.ndarray) -> np.ndarray:
        return (codes.astype(np.int64) << self._shifts).sum(axis=1)

    def element(self, code) -> PglElement:
        return PglElement(Matrix(np.asarray(code).reshape(self.n, self.n), self.spec))

    def encode(self, g) -> np.ndarray:
        if isinstance(g, PglElement):
            g = g.mat
        if isinstance(g, Matrix):
            g = g.entries
        code = np.asarray(g, dtype=np.uint8).reshape(1, self.width)
        return self.normalize(code)[0]


class PermDomain:
    """Permutations of {0..n-1} as image arrays; product is composition,
    ``(a * b)[i] = a[b[i]]``."""

    def __init__(self, n: int):
        if not 1 <= n <= 15:
            raise ValueError("permutation degree must be in 1..15")
        self.n = n
        self.width = n
        per = max(1, (n - 1).bit_length())
        self.bits = n * per
        self._shifts = np.arange(n, dtype=np.int64) * per

    def __repr__(self) -> str:
        return f"Sym({self.n})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PermDomain) and other.n == self.n

    def __hash__(self) -> int:
        return hash(("perm", self.n))

    def identity(self) -> np.ndarray:
        return np.arange(self.n, dtype=np.uint8)

    def compose(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a, b = np.broadcast_arrays(np.atleast_2d(a), np.atleast_2d(b))
        return np.take_along_axis(a, b.astype(np.intp), axis=1)

    def keys(self, codes: np.ndarray) -> np.ndarray:
        return (codes.astype(np.int64) << self._shifts).sum(axis=1)

    def element(self, code) -> tuple[int, ...]:
        return tuple(int(v) for v in code)

    def encode(self, g) -> np.ndarray:
        code = np.asarray(g, dtype=np.uint8)
        if sorted(code.tolist()) != list(range(self.n)):
            raise ValueError(f"{g!r} is not a permutation of {self.n} points")
        return code


@dataclass(frozen=True)
class PglElement:
    """Invertible matrix scaled so its first nonzero row-major entry is 1."""

    mat: Matrix

    def __post_init__(self):
        m = self.mat
        if rank(m.spec, m.entries) != m.n:
            raise NotInvertible("PGL elements must be invertible")
        flat = m.entries.reshape(1, -1)
        norm = PglDomain(m.n, m.spec).normalize(flat)
        object.__setattr__(self, "mat", Matrix(norm.reshape(m.n, m.n), m.spec))

    @classmethod
    def of(cls, rows, spec: FieldSpec | None = None) -> PglElement:
        return cls(Matrix(np.asarray(rows), spec or field(1)))

    def hex(self) -> str:
        return self.mat.hex()


def _domain_of(g):
    if isinstance(g, PglElement):
        return PglDomain(g.mat.n, g.mat.spec)
    if isinstance(g, Matrix):
        return PglDomain(g.n, g.spec)
    raise TypeError("pass domain= for generators that are not matrices")


class _Seen:
    """Membership set for int64 keys; a flat bitmap when the key space is small."""

    def __init__(self, bits: int):
        self.table = np.zeros(1 << bits, dtype=bool) if bits <= 28 else None
        self.sorted = np.empty(0, dtype=np.int64)

    def contains(self, keys: np.ndarray) -> np.ndarray:
        if self.table is not None:
            return self.table[keys]
        pos = np.searchsorted(self.sorted, keys)
        pos = np.minimum(pos, max(len(self.sorted) - 1, 0))
        return (len(self.sorted) > 0) & (self.sorted[pos] == keys)

    def add(self, keys: np.ndarray) -> None:
        if self.table is not None:
            self.table[keys] = True
        else:
            self.sorted = np.union1d(self.sorted, keys)


class FiniteGroup:
    """A group given by all its elements; index 0 is the identity."""

    def __init__(self, domain, codes: np.ndarray, generators=(), name: str = ""):
        self.domain = domain
        self.codes = np.ascontiguousarray(codes, dtype=np.uint8)
        self.codes.setflags(write=False)
        self.name = name
        keys = domain.keys(self.codes) if len(self.codes) else np.empty(0, np.int64)
        if not len(keys) or keys[0] != domain.keys(domain.identity()[None])[0]:
            raise ValueError("the identity must be element 0")
        self._order = np.argsort(keys, kind="stable")
        self._sorted = keys[self._order]
        if len(self._sorted) > 1 and np.any(self._sorted[1:] == self._sorted[:-1]):
            raise ValueError("duplicate elements")
        self.generators = [int(g) for g in generators]
        self._perm_cache: OrderedDict[tuple, np.ndarray] = OrderedDict()
        self._cache_size = max(4, (1 << 28) // max(1, 8 * len(self.codes)))
        self._inverses = None
        self._orders = None
        self._action_cols = None

    def __len__(self) -> int:
        return len(self.codes)

    @property
    def order(self) -> int:
        return len(self.codes)

    def __repr__(self) -> str:
        label = self.name or repr(self.domain)
        return f"<FiniteGroup {label} order={self.order}>"

    # -- lookup --------------------------------------------------------
    def index_of(self, codes: np.ndarray) -> np.ndarray:
        keys = self.domain.keys(np.atleast_2d(codes))
        pos = np.searchsorted(self._sorted, keys)
        pos = np.minimum(pos, len(self._sorted) - 1)
        if not np.all(self._sorted[pos] == keys):
            raise KeyError("element not in group")
        return self._order[pos]

    def index(self, g) -> int:
        return int(self.index_of(self.domain.encode(g)[None])[0])

    def __contains__(self, g) -> bool:
        try:
            self.index(g)
        except (KeyError, ValueError, NotInvertible):
            return False
        return True

    def element(self, i: int):
        return self.domain.element(self.codes[i])

    # -- arithmetic ----------------------------------------------------
    def compose_codes(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.atleast_2d(a)
        b = np.atleast_2d(b)
        if len(a) <= _CHUNK and len(b) <= _CHUNK:
            return self.domain.compose(a, b)
        n = max(len(a), len(b))
        out = np.empty((n, self.domain.width), dtype=np.uint8)
        for lo in range(0, n, _CHUNK):
            aa = a if len(a) == 1 else a[lo: lo + _CHUNK]
            bb = b if len(b) == 1 else b[lo: lo + _CHUNK]
            out[lo: lo + _CHUNK] = self.domain.compose(aa, bb)
        return out

    def mul(self, i: int, j: int) -> int:
        return int(self.index_of(self.domain.compose(self.codes[i][None], self.codes[j][None]))[0])

    def mul_many(self, left, right) -> np.ndarray:
        left = np.asarray(left)
        right = np.asarray(right)
        return self.index_of(self.compose_codes(self.codes[left], self.codes[right]))

    def _cached(self, key, build):
        perm = self._perm_cache.get(key)
        if perm is None:
            perm = build()
            self._perm_cache[key] = perm
            if len(self._perm_cache) > self._cache_size:
                self._perm_cache.popitem(last=False)
        else:
            self._perm_cache.move_to_end(key)
        return perm

    def right_perm(self, j: int) -> np.ndarray:
        """Index map x -> x * g_j."""
        return self._cached(("r", j), lambda: self._lookup(
            self.compose_codes(self.codes, self.codes[j][None])))

    def conj_perm(self, j: int) -> np.ndarray:
        """Index map x -> g_j^-1 x g_j."""
        def build():
            gi = self.codes[self.inverse(j)][None]
            left = self.compose_codes(gi, self.codes)
            return self._lookup(self.compose_codes(left, self.codes[j][None]))
        return self._cached(("c", j), build)

    def _lookup(self, codes: np.ndarray) -> np.ndarray:
        out = np.empty(len(codes), dtype=np.int64)
        for lo in range(0, len(codes), _CHUNK):
            out[lo: lo + _CHUNK] = self.index_of(codes[lo: lo + _CHUNK])
        return out.astype(np.int32) if len(codes) < 2**31 else out

    def _powers(self) -> None:
        n = self.order
        orders = np.zeros(n, dtype=np.int64)
        inverses = np.zeros(n, dtype=np.int64)
        ident = self.domain.keys(self.domain.identity()[None])[0]
        active = np.arange(n)
        prev = np.broadcast_to(self.domain.identity(), self.codes.shape).copy()
        cur = self.codes.copy()
        k = 1
        while len(active):
            done = self.domain.keys(cur) == ident
            if done.any():
                orders[active[done]] = k
                inverses[active[done]] = self._lookup(prev[done])
            keep = ~done
            active, prev, cur = active[keep], cur[keep], cur[keep]
            if len(active):
                cur = self.compose_codes(cur, self.codes[active])
            k += 1
        self._orders = orders
        self._inverses = inverses

    def inverse(self, i: int) -> int:
        if self._inverses is not None:
            return int(self._inverses[i])
        # powers of one element; avoids the whole-group table on large groups
        ident = self.domain.keys(self.domain.identity()[None])[0]
        g = self.codes[i][None]
        prev, cur = self.domain.identity()[None], g
        while self.domain.keys(cur)[0] != ident:
            prev, cur = cur, self.domain.compose(cur, g)
        return int(self.index_of(prev)[0])

    @property
    def inverses(self) -> np.ndarray:
        if self._inverses is None:
            self._powers()
        return self._inverses

    @property
    def element_orders(self) -> np.ndarray:
        if self._orders is None:
            self._powers()
        return self._orders

    def commute(self, i: int, j: int) -> bool:
        return self.mul(i, j) == self.mul(j, i)

    def is_abelian(self) -> bool:
        return all(self.commute(a, b) for a, b in combinations(self.generators, 2))

    def action_columns(self) -> np.ndarray:
        """F_2 coefficient-space action of every element (4x4 over F_2 only)."""
        from .forms import action_columns

        d = self.domain
        if not (isinstance(d, PglDomain) and d.n == 4 and d.spec.q == 2):
            raise ValueError("coefficient columns exist for PGL(4, 2) subgroups only")
        if self._action_cols is None:
            self._action_cols = action_columns(self.codes.reshape(-1, 4, 4))
        return self._action_cols


# -- construction ------------------------------------------------------

def closure(generators, limit: int | None = None, domain=None, name: str = "") -> FiniteGroup:
    """Breadth-first closure of ``generators`` under right multiplication."""
    gens = list(generators)
    if domain is None:
        if not gens:
            raise ValueError("an empty generator list needs an explicit domain")
        domain = _domain_of(gens[0])
    gcodes = np.array([domain.encode(g) for g in gens], dtype=np.uint8).reshape(-1, domain.width)
    ident = domain.identity()[None]
    seen = _Seen(domain.bits)
    seen.add(domain.keys(ident))
    blocks = [ident]
    frontier = ident
    total = 1
    while len(frontier) and len(gcodes):
        cand = np.concatenate([
            _compose_chunked(domain, frontier, g[None]) for g in gcodes
        ])
        ckeys = domain.keys(cand)
        ukeys, first = np.unique(ckeys, return_index=True)
        fresh = ~seen.contains(ukeys)
        order = np.sort(first[fresh])
        frontier = cand[order]
        seen.add(ukeys[fresh])
        total += len(frontier)
        if limit is not None and total > limit:
            raise LimitExceeded(f"group order exceeds {limit}")
        if len(frontier):
            blocks.append(frontier)
    codes = np.concatenate(blocks)
    group = FiniteGroup(domain, codes, name=name)
    group.generators = [int(i) for i in group.index_of(gcodes)] if len(gcodes) else []
    return group


def _compose_chunked(domain, a, b):
    if len(a) <= _CHUNK:
        return domain.compose(a, b)
    return np.concatenate([domain.compose(a[lo: lo + _CHUNK], b) for lo in range(0, len(a), _CHUNK)])


def gl_generators(n: int, spec: FieldSpec) -> list[PglElement]:
    """A transvection, the cyclic shift and (for q > 2) diag(w, 1, ..., 1)."""
    trans = np.eye(n, dtype=np.uint8)
    trans[0, 1] = 1
    shift = np.roll(np.eye(n, dtype=np.uint8), 1, axis=0)
    gens = [PglElement(Matrix(trans, spec)), PglElement(Matrix(shift, spec))]
    if spec.q > 2:
        diag = np.eye(n, dtype=np.uint8)
        diag[0, 0] = 2
        gens.append(PglElement(Matrix(diag, spec)))
    return gens


def pgl_order(n: int, q: int) -> int:
    order = 1
    for i in range(n):
        order *= q ** n - q ** i
    return order // (q - 1)


def pgl(n: int, spec: FieldSpec) -> FiniteGroup:
    """PGL_n(F_q) by closure; the order is checked against the formula."""
    g = closure(gl_generators(n, spec), name=f"PGL({n},{spec.q})")
    if g.order != pgl_order(n, spec.q):
        raise RuntimeError(f"closure gave {g.order}, expected {pgl_order(n, spec.q)}")
    return g


def generate(group: FiniteGroup, gens, start: np.ndarray | None = None) -> np.ndarray:
    """Membership mask of the subgroup generated by ``gens`` (and ``start``,
    which must already be a subgroup mask)."""
    mask = np.zeros(group.order, dtype=bool)
    if start is not None:
        mask |= start
    mask[0] = True
    perms = [group.right_perm(int(g)) for g in gens]
    frontier = np.flatnonzero(mask)
    while len(frontier) and perms:
        nxt = np.concatenate([p[frontier] for p in perms])
        nxt = np.unique(nxt[~mask[nxt]])
        mask[nxt] = True
        frontier = nxt
    return mask


def _generate_from(group: FiniteGroup, pool: np.ndarray, start=None, gens=None):
    """Grow a subgroup until it contains every index in ``pool``; returns
    (mask, generators added)."""
    gens = list(gens or [])
    mask = generate(group, gens) if start is None else start.copy()
    while True:
        outside = pool[~mask[pool]]
        if not len(outside):
            return mask, gens
        g = int(outside[0])
        gens.append(g)
        mask = generate(group, [*gens], start=mask)


def subgroup(group: FiniteGroup, mask: np.ndarray, name: str = "") -> FiniteGroup:
    """Materialize the members of ``mask`` as their own group."""
    idx = np.flatnonzero(mask)
    if not len(idx) or idx[0] != 0:
        raise ValueError("a subgroup mask must contain the identity")
    _, gens = _generate_from(group, idx)
    sub = FiniteGroup(group.domain, group.codes[idx], name=name)
    sub.generators = [int(i) for i in np.searchsorted(idx, gens)]
    return sub


OMEGA = np.eye(4, dtype=np.uint8)[::-1].copy()


def symplectic_group(omega=OMEGA, pgl4: FiniteGroup | None = None) -> FiniteGroup:
    """Elements g of PGL(4, 2) with g^T omega g == omega."""
    spec = field(1)
    pgl4 = pgl4 or pgl(4, spec)
    omega = np.asarray(omega.entries if isinstance(omega, Matrix) else omega, dtype=np.uint8)
    mats = pgl4.codes.reshape(-1, 4, 4)
    lhs = matmul(spec, matmul(spec, mats.transpose(0, 2, 1), omega[None]), mats)
    mask = np.all(lhs == omega[None], axis=(1, 2))
    return subgroup(pgl4, mask, name="Sp(4,2)")


def stabilizer_mask(group: FiniteGroup, f) -> np.ndarray:
    d = group.domain
    if isinstance(d, PglDomain) and d.n == 4 and d.spec.q == 2 and f.spec.q == 2:
        cols = group.action_columns()
        word = f.word
        img = np.zeros(group.order, dtype=np.uint32)
        for i in range(20):
            if word >> i & 1:
                img ^= cols[:, i]
        return img == word
    from .forms import act

    spec = f.spec
    out = np.zeros(group.order, dtype=bool)
    for i in range(group.order):
        h = act(group.element(i).mat, f)
        out[i] = _proportional(h.coeffs, f.coeffs, spec)
    return out


def _proportional(a, b, spec) -> bool:
    lead = next(i for i, c in enumerate(b) if c)
    if a[lead] == 0:
        return False
    s = spec.mul(a[lead], spec.inv(b[lead]))
    return all(x == spec.mul(s, y) for x, y in zip(a, b))


def stabilizer(group: FiniteGroup, f) -> FiniteGroup:
    """Elements fixing the surface f = 0, i.e. act(g, f) is a scalar multiple of f."""
    return subgroup(group, stabilizer_mask(group, f), name="Stab")


# -- classes and normal subgroups -------------------------------------

@dataclass
class ConjugacyClasses:
    reps: list[int]
    class_of: np.ndarray
    sizes: list[int]

    def __len__(self) -> int:
        return len(self.reps)

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.class_of == c)


def conjugacy_classes(group: FiniteGroup) -> ConjugacyClasses:
    """Orbits of conjugation by the generators; reps are least indices."""
    labels = component_labels(group.order, [group.conj_perm(g) for g in group.generators])
    reps, sizes = np.unique(labels, return_counts=True)
    class_of = np.searchsorted(reps, labels)
    return ConjugacyClasses([int(r) for r in reps], class_of, [int(s) for s in sizes])


@dataclass
class NormalSubgroup:
    mask: np.ndarray
    generators: list[int]
    abelian: bool

    @property
    def order(self) -> int:
        return int(self.mask.sum())

    @property
    def members(self) -> np.ndarray:
        return np.flatnonzero(self.mask)


@dataclass
class NormalSubgroupLattice:
    group: FiniteGroup
    subgroups: list[NormalSubgroup] = dc_field(default_factory=list)

    @property
    def orders(self) -> list[int]:
        return sorted({s.order for s in self.subgroups})

    @property
    def abelian(self) -> list[bool]:
        return [s.abelian for s in self.subgroups]


def _abelian(group: FiniteGroup, gens) -> bool:
    return all(group.commute(a, b) for a, b in combinations(gens, 2))


def normal_subgroups(group: FiniteGroup, max_classes: int = 64) -> NormalSubgroupLattice:
    """Every normal subgroup, as joins of normal closures of classes.

    Each normal subgroup is the join of the class closures it contains, so
    closing the set of class closures under joins (and intersections, which
    add nothing new but cost little) yields the whole lattice.
    """
    classes = conjugacy_classes(group)
    if len(classes) > max_classes:
        raise ClassLimitExceeded(f"{len(classes)} classes > {max_classes}")
    found: dict[bytes, NormalSubgroup] = {}

    def add(mask, gens) -> bool:
        key = np.packbits(mask).tobytes()
        if key in found:
            return False
        found[key] = NormalSubgroup(mask, list(gens), _abelian(group, gens))
        return True

    trivial = np.zeros(group.order, dtype=bool)
    trivial[0] = True
    add(trivial, [])
    for c in range(len(classes)):
        if classes.reps[c] == 0:
            continue
        mask, gens = _generate_from(group, classes.members(c))
        add(mask, gens)

    changed = True
    while changed:
        changed = False
        current = list(found.values())
        for a, b in combinations(current, 2):
            if np.array_equal(a.mask & b.mask, b.mask) or np.array_equal(a.mask & b.mask, a.mask):
                continue
            jmask, jgens = _generate_from(group, b.members, start=a.mask, gens=a.generators)
            changed |= add(jmask, jgens)
            imask = a.mask & b.mask
            _, igens = _generate_from(group, np.flatnonzero(imask))
            changed |= add(imask, igens)

    subs = sorted(found.values(), key=lambda s: (s.order, s.members.tolist()))
    return NormalSubgroupLattice(group, subs)


def verify_normal(group: FiniteGroup, sub: NormalSubgroup) -> bool:
    """Direct check: identity, inverses, closure under its generators,
    conjugation-stable under the group's generators, Lagrange."""
    mask = sub.mask
    members = np.flatnonzero(mask)
    if not mask[0] or group.order % len(members):
        return False
    if not np.all(mask[group.inverses[members]]):
        return False
    for g in sub.generators:
        if not mask[g] or not np.all(mask[group.right_perm(g)[members]]):
            return False
    return all(np.all(mask[group.conj_perm(g)[members]]) for g in group.generators)


def min_index_normal_abelian(group: FiniteGroup, lattice: NormalSubgroupLattice | None = None) -> int:
    """|G| over the largest abelian normal subgroup."""
    if group.is_abelian():
        return 1
    lattice = lattice or normal_subgroups(group)
    best = max(s.order for s in lattice.subgroups if s.abelian)
    return group.order // best
