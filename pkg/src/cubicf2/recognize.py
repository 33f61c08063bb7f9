"""Recognizing the order-720 group: point action, S_n, isomorphism search."""

from __future__ import annotations

import time
from dataclasses import dataclass
import numpy as np

from .checks import Check, CheckFailed
from .gf2k import field
from .groups import (
    FiniteGroup,
    PermDomain,
    PglDomain,
    closure,
    conjugacy_classes,
    generate,
    normal_subgroups,
    pgl,
)
from .projspace import enumerate_points
from .unionfind import DisjointSet

__all__ = [
    "lemma_a2_certificates",
    "PermAction",
    "IsoWitness",
    "action_on_points",
    "symmetric_group",
    "cyclic_group",
    "perm_group",
    "is_isomorphic",
    "verify_witness",
    "small_generating_set",
    "uniqueness_certificates",
    "count_pointless_forms",
]


@dataclass
class PermAction:
    degree: int
    images: np.ndarray
    faithful: bool
    orbit_sizes: list[int]

    @property
    def transitive(self) -> bool:
        return self.orbit_sizes == [self.degree]


def action_on_points(group: FiniteGroup) -> PermAction:
    """Permutation action of a PGL(4, 2) subgroup on the 15 points of P^3(F_2)."""
    d = group.domain
    if not (isinstance(d, PglDomain) and d.n == 4 and d.spec.q == 2):
        raise ValueError("expected a subgroup of PGL(4, 2)")
    pts = enumerate_points(3, d.spec)
    cols = np.array([p.coords for p in pts], dtype=np.uint8).T  # 4 x 15
    # over F_2 every nonzero vector is already a normalized point
    moved = (group.codes.reshape(-1, 4, 4).astype(np.int64) @ cols.astype(np.int64)) & 1
    weights = np.array([8, 4, 2, 1], dtype=np.int64)
    lookup = np.full(16, -1, dtype=np.int64)
    for i, p in enumerate(pts):
        lookup[int(np.dot(p.coords, weights))] = i
    vals = np.einsum("nkp,k->np", moved, weights)
    images = lookup[vals].astype(np.uint8)
    ident = np.arange(15, dtype=np.uint8)
    fixed_all = np.all(images == ident[None], axis=1)
    faithful = int(fixed_all.sum()) == 1
    ds = DisjointSet(15)
    for g in group.generators:
        for a, b in enumerate(images[g]):
            ds.union(a, int(b))
    sizes = sorted(len(b) for b in ds.blocks().values())
    return PermAction(15, images, faithful, sizes)


def perm_group(gens, n: int, name: str = "") -> FiniteGroup:
    return closure([np.asarray(g, dtype=np.uint8) for g in gens], domain=PermDomain(n), name=name)


def symmetric_group(n: int) -> FiniteGroup:
    """S_n generated by the transposition (0 1) and the n-cycle."""
    if not 1 <= n <= 7:
        raise ValueError("symmetric_group supports 1 <= n <= 7")
    if n == 1:
        return perm_group([], 1, name="S1")
    swap = list(range(n))
    swap[0], swap[1] = 1, 0
    cycle = [(i + 1) % n for i in range(n)]
    return perm_group([swap, cycle], n, name=f"S{n}")


def cyclic_group(n: int) -> FiniteGroup:
    return perm_group([[(i + 1) % n for i in range(n)]], n, name=f"C{n}")


# -- isomorphism -------------------------------------------------------

@dataclass
class IsoWitness:
    generators: list[int]
    images: list[int]
    mapping: np.ndarray
    verified: bool


def _class_keys(group: FiniteGroup):
    cc = conjugacy_classes(group)
    orders = group.element_orders
    sizes = np.array(cc.sizes)[cc.class_of]
    return orders * (group.order + 1) + sizes, cc


def small_generating_set(group: FiniteGroup, tries: int = 400) -> list[int]:
    """Two generators if a short search finds them, else a greedy set."""
    if group.order == 1:
        return []
    orders = group.element_orders
    by_order = np.argsort(-orders, kind="stable")
    first = int(by_order[0])
    mask = generate(group, [first])
    if mask.all():
        return [first]
    attempts = 0
    for second in by_order:
        second = int(second)
        if mask[second]:
            continue
        if generate(group, [first, second], start=mask).all():
            return [first, second]
        attempts += 1
        if attempts >= tries:
            break
    gens = [first]
    while not mask.all():
        nxt = int(next(g for g in by_order if not mask[g]))
        gens.append(nxt)
        mask = generate(group, gens, start=mask)
    return gens


def _extend(g: FiniteGroup, h: FiniteGroup, gens, images) -> np.ndarray | None:
    """Propagate x*g_i -> phi(x)*h_i along the Cayley graph; None on conflict."""
    pg = [g.right_perm(a) for a in gens]
    ph = [h.right_perm(b) for b in images]
    phi = np.full(g.order, -1, dtype=np.int64)
    phi[0] = 0
    frontier = np.array([0])
    while len(frontier):
        nxt = []
        for p, q in zip(pg, ph):
            tgt = p[frontier]
            img = q[phi[frontier]]
            known = phi[tgt] >= 0
            if np.any(phi[tgt[known]] != img[known]):
                return None
            new_t, first = np.unique(tgt[~known], return_index=True)
            phi[new_t] = img[~known][first]
            nxt.append(new_t)
        frontier = np.unique(np.concatenate(nxt))
    if np.any(phi < 0):
        return None
    for p, q in zip(pg, ph):
        if np.any(phi[p] != q[phi]):
            return None
    if len(np.unique(phi)) != g.order:
        return None
    return phi


def verify_witness(g: FiniteGroup, h: FiniteGroup, w: IsoWitness, samples: int = 2000) -> bool:
    """Re-check a witness from scratch: rebuild the map from the generator
    images, then test bijectivity, every Cayley edge, random products and
    class sizes."""
    if not generate(g, w.generators).all():
        return False
    phi = _extend(g, h, w.generators, w.images)
    if phi is None or not np.array_equal(phi, w.mapping):
        return False
    rng = np.random.default_rng(0)
    x = rng.integers(0, g.order, samples)
    y = rng.integers(0, g.order, samples)
    if np.any(phi[g.mul_many(x, y)] != h.mul_many(phi[x], phi[y])):
        return False
    kg, _ = _class_keys(g)
    kh, _ = _class_keys(h)
    return bool(np.all(kg == kh[phi]))


def is_isomorphic(g: FiniteGroup, h: FiniteGroup) -> IsoWitness | None:
    """Backtracking over generator images; ``None`` means not isomorphic."""
    if g.order != h.order:
        return None
    kg, ccg = _class_keys(g)
    kh, cch = _class_keys(h)
    prof_g = sorted(kg[r] for r in ccg.reps)
    prof_h = sorted(kh[r] for r in cch.reps)
    if prof_g != prof_h:
        return None
    gens = small_generating_set(g)
    if not gens:
        return IsoWitness([], [], np.zeros(1, dtype=np.int64), True)

    # the first image may be taken up to conjugacy in h
    first_cands = [r for r in cch.reps if kh[r] == kg[gens[0]]]
    pools = [np.flatnonzero(kh == kg[a]) for a in gens[1:]]
    # order of each prefix product constrains the search
    prefix = [gens[0]]
    for a in gens[1:]:
        prefix.append(g.mul(prefix[-1], a))
    target_orders = [int(g.element_orders[p]) for p in prefix]

    def search(level: int, images: list[int], prod: int):
        if level == len(gens):
            phi = _extend(g, h, gens, images)
            if phi is not None:
                return IsoWitness(list(gens), list(images), phi, False)
            return None
        for b in pools[level - 1]:
            b = int(b)
            nprod = h.mul(prod, b)
            if h.element_orders[nprod] != target_orders[level]:
                continue
            found = search(level + 1, images + [b], nprod)
            if found:
                return found
        return None

    for a in first_cands:
        w = search(1, [int(a)], int(a))
        if w is not None:
            w.verified = verify_witness(g, h, w)
            if w.verified:
                return w
    return None


# -- certificates for the order-720 stabilizer ------------------

def count_pointless_forms(chunk: int = 1 << 18) -> int:
    """Nonzero F_2 cubic forms with no zero among the 15 points."""
    from .forms import point_masks

    masks = point_masks()
    bad = 0
    for lo in range(1, 1 << 20, chunk):
        words = np.arange(lo, min(lo + chunk, 1 << 20), dtype=np.uint32)
        vanish = np.zeros(len(words), dtype=bool)
        for m in masks:
            vanish |= (np.bitwise_count(words & m) & 1) == 0
        bad += int((~vanish).sum())
    return bad


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def uniqueness_certificates(group: FiniteGroup, raise_on_failure: bool = True) -> list[Check]:
    """Four facts about the order-720 stabilizer behind the uniqueness argument."""
    out = []

    t = time.perf_counter()
    gl3 = pgl(3, field(1)).order  # GL_3(F_2) == PGL_3(F_2)
    fac = _factor(gl3)
    out.append(Check("a: 5 does not divide |GL3(F2)|", gl3 % 5 != 0 and 5 not in fac,
                     f"{gl3} = " + " * ".join(f"{p}^{e}" for p, e in sorted(fac.items())),
                     "168 without a factor 5", time.perf_counter() - t))

    t = time.perf_counter()
    lattice = normal_subgroups(group)
    orders = lattice.orders
    survivors = []
    for n in orders:
        image = group.order // n
        # transitive image on 5 cosets: divisible by 5, divides 5! = 120
        if image % 5 == 0 and 120 % image == 0:
            survivors.append(image)
    out.append(Check("b: no subgroup of index 5", orders == [1, 360, 720] and not survivors,
                     {"normal_orders": orders, "surviving_images": survivors},
                     {"normal_orders": [1, 360, 720], "surviving_images": []},
                     time.perf_counter() - t))

    t = time.perf_counter()
    action = action_on_points(group)
    out.append(Check("c: action on the 15 points is transitive and faithful",
                     action.transitive and action.faithful,
                     {"orbit_sizes": action.orbit_sizes, "faithful": action.faithful},
                     {"orbit_sizes": [15], "faithful": True}, time.perf_counter() - t))

    t = time.perf_counter()
    bad = count_pointless_forms()
    out.append(Check("d: every nonzero cubic has an F2-point", bad == 0, bad, 0,
                     time.perf_counter() - t))

    if raise_on_failure:
        for c in out:
            if not c.passed:
                raise CheckFailed(c)
    return out


lemma_a2_certificates = uniqueness_certificates
