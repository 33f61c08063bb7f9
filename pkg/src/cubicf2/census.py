"""Exhaustive classification of nonzero cubic forms over F_2 up to PGL(4, 2).

Every one of the 2^20 - 1 forms is a 20-bit word.  The two generators of
GL(4, 2) act on words through precomputed coefficient columns; the orbits are
the connected components of the resulting graph, labelled by their least
word.  Each orbit representative then gets a smoothness verdict, the order of
its stabilizer, and whether it vanishes on all 15 points of P^3(F_2).
"""

from __future__ import annotations

import logging
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .checks import Check, CheckFailed
from .forms import (
    MONOMIALS,
    CubicForm,
    action_columns,
    apply_columns,
    s6_form,
    pencil_cubic,
    vanishing_family_form,
    vanishing_matrix,
)
from .gf2k import field
from .groups import FiniteGroup, gl_generators, pgl, stabilizer, stabilizer_mask
from .idealtest import is_smooth
from .projspace import enumerate_lines
from .unionfind import component_labels

__all__ = [
    "corollary_a3_check",
    "GROUP_ORDER",
    "NFORMS",
    "OrbitPartition",
    "OrbitRecord",
    "CensusReport",
    "CacheError",
    "build_partition",
    "orbit_records",
    "fifteen_point_analysis",
    "s6_orbit_check",
    "run_census",
    "write_cache",
    "read_cache",
]

log = logging.getLogger(__name__)

GROUP_ORDER = 20160
NFORMS = (1 << 20) - 1
MAGIC = b"CBC1"
_RECORD = np.dtype([("root", "<u4"), ("size", "<u4"), ("smooth", "u1"),
                    ("aut_order", "<u4"), ("all15", "u1")])


class CacheError(ValueError):
    pass


@dataclass
class OrbitPartition:
    parent: np.ndarray  # parent[w - 1] is the least word in the orbit of w
    reps: list[int]
    orbit_size: dict[int, int]

    def root(self, word: int) -> int:
        return int(self.parent[word - 1])

    @classmethod
    def from_parent(cls, parent: np.ndarray) -> OrbitPartition:
        roots, sizes = np.unique(parent, return_counts=True)
        return cls(parent, [int(r) for r in roots], {int(r): int(s) for r, s in zip(roots, sizes)})


@dataclass
class OrbitRecord:
    rep: int
    orbit_size: int
    smooth: bool
    aut_order: int
    passes_all_15: bool

    @property
    def form(self) -> CubicForm:
        return CubicForm.from_word(self.rep)

    def as_json(self) -> dict:
        return {
            "rep": f"{self.rep:05x}",
            "orbit_size": str(self.orbit_size),
            "smooth": self.smooth,
            "aut_order": str(self.aut_order),
            "all15": self.passes_all_15,
        }


def build_partition(generators=None) -> OrbitPartition:
    """Union-find over all nonzero words under the substitution action."""
    spec = field(1)
    gens = generators or gl_generators(4, spec)
    from .groups import closure

    order = closure(gens, limit=GROUP_ORDER).order
    if order != GROUP_ORDER:
        raise ValueError(f"generators give a group of order {order}, not {GROUP_ORDER}")
    mats = np.array([g.mat.entries for g in gens])
    cols = action_columns(mats)
    words = np.arange(1 << 20, dtype=np.uint32)
    images = [apply_columns(c, words).astype(np.int64) for c in cols]
    labels = component_labels(1 << 20, images)
    if labels[0] != 0:
        raise RuntimeError("the zero form must be fixed")
    return OrbitPartition.from_parent(labels[1:].astype(np.uint32))


def _smooth_flag(word: int) -> bool:
    return is_smooth(CubicForm.from_word(word), method="both").smooth


def orbit_records(partition: OrbitPartition, group: FiniteGroup | None = None,
                  threads: int = 1) -> list[OrbitRecord]:
    group = group or pgl(4, field(1))
    reps = partition.reps
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            smooth = list(pool.map(_smooth_flag, reps, chunksize=8))
    else:
        smooth = [_smooth_flag(w) for w in reps]
    all15 = vanishing_matrix(np.array(reps, dtype=np.uint32)).all(axis=1)
    out = []
    for w, s, a in zip(reps, smooth, all15):
        aut = int(stabilizer_mask(group, CubicForm.from_word(w)).sum())
        out.append(OrbitRecord(w, partition.orbit_size[w], bool(s), aut, bool(a)))
    return out


@dataclass
class CensusReport:
    partition: OrbitPartition
    records: list[OrbitRecord]
    checks: list[Check] = dc_field(default_factory=list)

    @property
    def smooth_records(self) -> list[OrbitRecord]:
        return [r for r in self.records if r.smooth]

    @property
    def max_aut(self) -> OrbitRecord:
        return max(self.smooth_records, key=lambda r: (r.aut_order, -r.rep))

    @property
    def unique_max(self) -> bool:
        best = self.max_aut.aut_order
        return sum(r.aut_order == best for r in self.smooth_records) == 1

    def totals(self) -> dict:
        return {
            "forms": sum(r.orbit_size for r in self.records),
            "orbits": len(self.records),
            "smooth_orbits": len(self.smooth_records),
            "smooth_forms": sum(r.orbit_size for r in self.smooth_records),
        }

    def as_json(self, timings: bool = True) -> dict:
        best = self.max_aut
        return {
            "totals": {k: str(v) for k, v in self.totals().items()},
            "max_smooth_aut": {"order": str(best.aut_order), "rep": f"{best.rep:05x}",
                               "unique": self.unique_max},
            "checks": [c.as_json(timings) for c in self.checks],
            "orbits": [r.as_json() for r in self.records],
        }


def census_checks(partition: OrbitPartition, records: list[OrbitRecord]) -> list[Check]:
    """Totals, orbit-stabilizer identity and the maximal smooth stabilizer."""
    out = []
    total = sum(r.orbit_size for r in records)
    out.append(Check("forms covered", total == NFORMS and len(partition.parent) == NFORMS,
                     total, NFORMS))
    bad = [f"{r.rep:05x}" for r in records if r.aut_order * r.orbit_size != GROUP_ORDER]
    out.append(Check("aut_order * orbit_size == 20160 for every orbit", not bad,
                     f"{len(bad)} violations", "0 violations"))
    roots_ok = [r.rep for r in records] == partition.reps and all(
        partition.orbit_size.get(r.rep) == r.orbit_size for r in records)
    out.append(Check("records match partition", roots_ok, roots_ok, True))
    smooth = [r for r in records if r.smooth]
    best = max((r.aut_order for r in smooth), default=0)
    at_best = [r for r in smooth if r.aut_order == best]
    f1_root = partition.root(s6_form().word)
    out.append(Check("max smooth aut_order", best == 720, best, 720))
    out.append(Check("max attained on one orbit containing x^2t+y^2z+z^2y+t^2x",
                     len(at_best) == 1 and at_best[0].rep == f1_root,
                     [f"{r.rep:05x}" for r in at_best], [f"{f1_root:05x}"]))
    return out


def fifteen_point_analysis(partition: OrbitPartition, records: list[OrbitRecord],
                           raise_on_failure: bool = True) -> list[Check]:
    """The 63 / 35 / 28 count of forms through all 15 points."""
    words = np.arange(1, 1 << 20, dtype=np.uint32)
    through_all = words[vanishing_matrix(words).all(axis=1)]
    family = sorted(vanishing_family_form(a).word for a in range(1, 64))
    out = [Check("forms vanishing on all 15 points", len(through_all) == 63
                 and sorted(through_all.tolist()) == family, len(through_all), 63)]

    pencils = [pencil_cubic(line).form for line in enumerate_lines(field(1))]
    pwords = {f.word for f in pencils}
    verdicts = [is_smooth(f) for f in pencils]
    ok = (len(pwords) == 35 and pwords <= set(through_all.tolist())
          and all(not v.smooth and v.witness and v.witness[0] == 1 for v in verdicts))
    out.append(Check("pencil cubics: distinct, through all 15, singular with F2 witness",
                     ok, len(pwords), 35))

    rest = sorted(set(through_all.tolist()) - pwords)
    by_word = {r.rep: r for r in records}
    smooth_rest = [w for w in rest if by_word[partition.root(w)].smooth]
    roots = {partition.root(w) for w in rest}
    out.append(Check("remaining forms: smooth, one orbit", len(rest) == 28
                     and len(smooth_rest) == 28 and len(roots) == 1, (len(rest), len(roots)), (28, 1)))
    f1_root = partition.root(s6_form().word)
    out.append(Check("that orbit is the orbit of x^2t+y^2z+z^2y+t^2x",
                     roots == {f1_root} and partition.orbit_size[f1_root] == 28,
                     [f"{r:05x}" for r in sorted(roots)], [f"{f1_root:05x}"]))
    if raise_on_failure:
        for c in out:
            if not c.passed:
                raise CheckFailed(c)
    return out


def s6_orbit_check(partition: OrbitPartition, records: list[OrbitRecord],
                       group: FiniteGroup | None = None) -> bool:
    """Smooth orbits with an S6 automorphism group are exactly the smooth
    orbits through all 15 points."""
    from .recognize import is_isomorphic, symmetric_group

    group = group or pgl(4, field(1))
    s6 = symmetric_group(6)
    with_s6 = set()
    for r in records:
        if r.smooth and r.aut_order == 720:
            if is_isomorphic(stabilizer(group, r.form), s6) is not None:
                with_s6.add(r.rep)
    through_all = {r.rep for r in records if r.smooth and r.passes_all_15}
    return bool(with_s6) and with_s6 == through_all


def run_census(cache: str | Path | None = None, threads: int = 1) -> CensusReport:
    """Load the census from ``cache`` if present, otherwise compute (and save)."""
    if cache is not None and Path(cache).exists():
        partition, records = read_cache(cache)
    else:
        log.info("building orbit partition")
        partition = build_partition()
        log.info("%d orbits; computing records", len(partition.reps))
        records = orbit_records(partition, threads=threads)
        if cache is not None:
            write_cache(cache, partition, records)
    report = CensusReport(partition, records)
    report.checks = census_checks(partition, records)
    return report


def write_cache(path, partition: OrbitPartition, records: list[OrbitRecord]) -> None:
    recs = np.array([(r.rep, r.orbit_size, r.smooth, r.aut_order, r.passes_all_15)
                     for r in records], dtype=_RECORD)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        for e in MONOMIALS:
            fh.write(struct.pack("4B", *e))
        fh.write(partition.parent.astype("<u4").tobytes())
        fh.write(recs.tobytes())


def read_cache(path) -> tuple[OrbitPartition, list[OrbitRecord]]:
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise CacheError(f"{path}: unknown magic {data[:4]!r}")
    pos = 4
    order = [tuple(data[pos + 4 * i: pos + 4 * i + 4]) for i in range(20)]
    if order != list(MONOMIALS):
        raise CacheError(f"{path}: monomial order mismatch")
    pos += 80
    end = pos + 4 * NFORMS
    if len(data) < end or (len(data) - end) % _RECORD.itemsize:
        raise CacheError(f"{path}: truncated or malformed")
    parent = np.frombuffer(data[pos:end], dtype="<u4").astype(np.uint32)
    recs = np.frombuffer(data[end:], dtype=_RECORD)
    records = [OrbitRecord(int(r["root"]), int(r["size"]), bool(r["smooth"]),
                           int(r["aut_order"]), bool(r["all15"])) for r in recs]
    return OrbitPartition.from_parent(parent), records


corollary_a3_check = s6_orbit_check
