"""Acceptance criteria 1-11, one printed PASS/FAIL line each.

Runs under pytest (lines appear in the terminal summary) or directly:
``python tests/test_acceptance.py``.  Criterion 11 materializes PGL3(F8) and
only runs with ``--run-f8`` or ``CUBICF2_RUN_F8=1``.
"""

from __future__ import annotations

import math
import os
import sys
import time
from functools import lru_cache

import numpy as np
import pytest

from cubicf2.census import fifteen_point_analysis, run_census
from cubicf2.forms import (
    CubicForm,
    act,
    action_columns,
    apply_columns,
    contains_line,
    derivative,
    s6_form,
    times_variable,
    vanishing_family_form,
)
from cubicf2.gf2k import MODULI, Matrix, field, rank
from cubicf2.groups import OMEGA, min_index_normal_abelian, pgl, stabilizer, symplectic_group
from cubicf2.idealtest import is_smooth, singular_point_search
from cubicf2.jordan import gcd_checks, jordan_constant, pgl3, pgl3_f8_simple, wps_aut, wps_aut_enumerate
from cubicf2.projspace import LINE_XY, LINE_ZT, are_skew
from cubicf2.recognize import is_isomorphic, symmetric_group, uniqueness_certificates

LINES: list[str] = []
SEED = 20240611


def record(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} | {detail}"
    LINES.append(line)
    print(line)
    assert ok, line


@lru_cache(maxsize=None)
def fresh_census():
    t = time.perf_counter()
    c = run_census(None)
    return c, time.perf_counter() - t


@lru_cache(maxsize=None)
def pgl4():
    return pgl(4, field(1))


@lru_cache(maxsize=None)
def aut1():
    return stabilizer(pgl4(), s6_form())


def test_criterion_01_census_totals():
    census, seconds = fresh_census()
    t = census.totals()
    sizes_ok = sum(census.partition.orbit_size.values()) == 1_048_575
    stab_ok = all(r.aut_order * r.orbit_size == 20160 for r in census.records)
    ok = t["forms"] == 1_048_575 and sizes_ok and stab_ok and seconds <= 600
    record(1, "census covers 2^20-1 forms, orbit-stabilizer on every orbit", ok,
           f"forms={t['forms']} orbits={t['orbits']} orbit_stabilizer={stab_ok} time={seconds:.1f}s (<= 600s)")


def test_criterion_02_unique_maximum():
    census, _ = fresh_census()
    smooth = census.smooth_records
    best = max(r.aut_order for r in smooth)
    at = [r for r in smooth if r.aut_order == best]
    root = census.partition.root(s6_form().word)
    ok = best == 720 and len(at) == 1 and at[0].rep == root
    record(2, "max smooth aut_order 720 on exactly one orbit, containing form (1)", ok,
           f"max={best} orbits_at_max={len(at)} rep={at[0].rep:05x} form1_root={root:05x}")


def test_criterion_03_fifteen_points():
    census, _ = fresh_census()
    checks = fifteen_point_analysis(census.partition, census.records, raise_on_failure=False)
    ok = all(c.passed for c in checks)
    record(3, "63 forms through all 15 points = 35 singular pencil cubics + 28 smooth in one orbit", ok,
           "; ".join(f"{c.name}: {c.value}" for c in checks))


def test_criterion_04_symplectic_example():
    t = time.perf_counter()
    sp = symplectic_group(OMEGA, pgl4())
    same = set(map(bytes, sp.codes)) == set(map(bytes, aut1().codes))
    w = is_isomorphic(aut1(), symmetric_group(6))
    f = s6_form()
    lines_ok = contains_line(f, LINE_XY) and contains_line(f, LINE_ZT)
    skew = are_skew(LINE_XY, LINE_ZT, field(1))
    seconds = time.perf_counter() - t
    ok = sp.order == 720 and same and w is not None and w.verified and lines_ok and skew and seconds <= 30
    record(4, "symplectic filter = Stab(form 1) = S6, two skew lines on S", ok,
           f"|Sp|={sp.order} set_equal={same} iso_verified={w is not None and w.verified} "
           f"lines_on_S={lines_ok} skew={skew} time={seconds:.1f}s (<= 30s)")


def test_criterion_05_certificates():
    checks = uniqueness_certificates(aut1(), raise_on_failure=False)
    d_seconds = checks[3].seconds
    ok = all(c.passed for c in checks) and d_seconds <= 60
    record(5, "certificates (a) 5 !| 168 (b) no index-5 subgroup (c) faithful transitive (d) no pointless cubic", ok,
           " ".join(f"({c.name[0]})={'ok' if c.passed else 'BAD'}" for c in checks)
           + f" scan={d_seconds:.1f}s (<= 60s)")


def test_criterion_06_weighted_projective():
    e2, e4 = wps_aut_enumerate(2), wps_aut_enumerate(4)
    ineq = all(2 * wps_aut(q) < pgl3(q) for q in (2, 4, 8))
    ok = e2 == 48 == wps_aut(2) and e4 == wps_aut(4) and ineq
    record(6, "|Aut P(1,1,2)| by enumeration matches q^4(q-1)^2(q+1); 2|Aut| < |PGL3|", ok,
           f"q=2: {e2}; q=4: {e4} = 4^4*3^2*5 (the stated literal 46080 is 4x this closed form; "
           f"the closed form governs); inequalities q=2,4,8: {ineq}")


def test_criterion_07_arithmetic():
    checks = gcd_checks()
    ok = (all(c.passed for c in checks) and math.gcd(2520, 51840) == 360
          and math.gcd(1344, 51840) == 192 and 51840 % 20160 != 0)
    record(7, "gcd(2520,51840)=360, gcd(1344,51840)=192, 20160 !| 51840, 51840=2^7*3^4*5", ok,
           "; ".join(f"{c.value}" for c in checks))


def test_criterion_08_jordan_table():
    census, _ = fresh_census()
    got = {}
    ingredients = True
    for q in (2, 4, 8):
        rep = jordan_constant(q, census=census if q == 2 else None)
        got[q] = rep.constant
        ingredients &= rep.passed
    t = time.perf_counter()
    g4 = pgl(3, field(2))
    idx4 = min_index_normal_abelian(g4)
    f4_seconds = time.perf_counter() - t
    idx = {"S6": min_index_normal_abelian(aut1()), "PGL3(F2)": min_index_normal_abelian(pgl(3, field(1))),
           "PGL3(F4)": idx4}
    ok = (got == {2: 720, 4: 60480, 8: 16482816} and ingredients and idx["S6"] == 720
          and idx["PGL3(F2)"] == 168 and idx4 == g4.order == 60480 and f4_seconds <= 300)
    record(8, "J(Cr2(F_q)) = 720 / 60480 / 16482816, normal abelian index = full order", ok,
           f"constants={got} ingredients_pass={ingredients} min_index={idx} PGL3(F4) time={f4_seconds:.1f}s (<= 300s)")


def test_criterion_09_oracle_agreement():
    rng = np.random.default_rng(SEED)
    forms = [vanishing_family_form(a) for a in range(1, 64)]
    forms += [CubicForm.from_word(int(w)) for w in rng.integers(1, 1 << 20, 200)]
    conflicts = undecided = 0
    for f in forms:
        smooth = is_smooth(f, method="groebner").smooth
        witness = singular_point_search(f, kmax=4)
        if smooth and witness is not None:
            conflicts += 1
        if not smooth and witness is None:
            undecided += 1
    record(9, "Groebner and k <= 4 point search never conflict", conflicts == 0,
           f"forms={len(forms)} conflicts={conflicts} singular_without_small_witness={undecided}")


def _field_axioms(k: int) -> bool:
    spec = field(k)
    t = spec.mul_table.astype(np.int64)
    a = np.arange(spec.q)
    # independent carry-less oracle on every pair
    clmul = np.zeros_like(t)
    for i in range(k):
        clmul ^= ((a[None, :] >> i) & 1) * (a[:, None] << i)
    for d in range(2 * k - 2, k - 1, -1):
        hit = (clmul >> d) & 1
        clmul ^= hit * (MODULI[k] << (d - k))
    return bool(
        np.array_equal(t, clmul)
        and np.array_equal(t[t[:, :, None], a[None, None, :]], t[a[:, None, None], t[None, :, :]])
        and np.array_equal(t[a[:, None, None], a[None, :, None] ^ a[None, None, :]], t[:, :, None] ^ t[:, None, :])
        and np.all(t[a[1:], spec.inv_table[1:].astype(np.int64)] == 1)
    )


def test_criterion_10_properties():
    rng = np.random.default_rng(SEED)
    fields_ok = all(_field_axioms(k) for k in range(1, 9))

    euler = np.zeros(20, dtype=np.uint32)
    for i in range(20):
        mono = CubicForm.from_word(1 << i)
        for v in range(4):
            euler[i] ^= times_variable(derivative(mono, v), v, field(1)).word
    words = np.arange(1 << 20, dtype=np.uint32)
    euler_ok = bool(np.array_equal(apply_columns(euler, words), words))

    spec = field(1)
    mats = []
    while len(mats) < 40:
        m = rng.integers(0, 2, (4, 4))
        if rank(spec, m) == 4:
            mats.append(Matrix(m, spec))
    compat = True
    for g, h in zip(mats[::2], mats[1::2]):
        f = CubicForm.from_word(int(rng.integers(1, 1 << 20)))
        compat &= act(g, act(h, f)) == act(h @ g, f)
    cols = action_columns(np.array([m.entries for m in mats[:5]]))
    sample = rng.integers(1, 1 << 20, 100, dtype=np.uint32)
    for m, c in zip(mats[:5], cols):
        compat &= apply_columns(c, sample).tolist() == [act(m, CubicForm.from_word(int(w))).word for w in sample]

    invariant = True
    for w in rng.integers(1, 1 << 20, 20):
        f = CubicForm.from_word(int(w))
        base = is_smooth(f, method="groebner").smooth
        for g in mats[:3]:
            invariant &= is_smooth(act(g, f), method="groebner").smooth == base
    ok = fields_ok and euler_ok and bool(compat) and bool(invariant)
    record(10, "property suites", ok,
           f"field axioms q<=256={fields_ok} euler over 2^20 forms={euler_ok} "
           f"action compatibility={bool(compat)} smoothness orbit invariance={bool(invariant)} seed={SEED}")


@pytest.mark.skipif(os.environ.get("CUBICF2_RUN_F8") != "1",
                    reason="opt-in: pass --run-f8 or set CUBICF2_RUN_F8=1")
def test_criterion_11_pgl3_f8():
    c = pgl3_f8_simple()
    record(11, "PGL3(F8) materialized, order 16482816, simple (optional)", c.passed, f"{c.value}")


if __name__ == "__main__":
    failed = 0
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    for fn in tests:
        if fn.__name__.endswith("pgl3_f8") and os.environ.get("CUBICF2_RUN_F8") != "1":
            print("[SKIP] criterion 11: PGL3(F8) (set CUBICF2_RUN_F8=1 to run)")
            continue
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
