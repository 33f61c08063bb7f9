import numpy as np
import pytest

from cubicf2.census import (
    NFORMS,
    CacheError,
    build_partition,
    fifteen_point_analysis,
    read_cache,
    s6_orbit_check,
    write_cache,
)
from cubicf2.checks import CheckFailed
from cubicf2.forms import CubicForm, act, action_columns, apply_columns, fermat_form, s6_form
from cubicf2.gf2k import Matrix, field, rank
from cubicf2.groups import gl_generators, PglElement
from cubicf2.idealtest import is_smooth


def test_totals(census):
    t = census.totals()
    assert t["forms"] == NFORMS
    # golden values for the canonical partition
    assert t["orbits"] == 141
    assert t["smooth_orbits"] == 36
    assert all(c.passed for c in census.checks), [c.line() for c in census.checks if not c.passed]


def test_orbit_stabilizer_every_orbit(census):
    assert all(r.aut_order * r.orbit_size == 20160 for r in census.records)


def test_records_sorted_and_roots_minimal(census):
    reps = [r.rep for r in census.records]
    assert reps == sorted(reps)
    parent = census.partition.parent
    assert np.all(parent <= np.arange(1, NFORMS + 1))


def test_max_smooth_aut(census):
    best = census.max_aut
    assert best.aut_order == 720 and census.unique_max
    assert best.rep == census.partition.root(s6_form().word)
    assert best.orbit_size == 28
    assert all(r.aut_order < 720 for r in census.smooth_records if r is not best)


def test_partition_is_invariant(census, f2, rng):
    # every random group element maps each form into its own block
    parent = census.partition.parent
    mats = []
    while len(mats) < 20:
        m = rng.integers(0, 2, (4, 4))
        if rank(f2, m) == 4:
            mats.append(m)
    cols = action_columns(np.array(mats))
    words = np.arange(1, 1 << 20, dtype=np.uint32)
    for c in cols:
        img = apply_columns(c, words)
        assert np.array_equal(parent[img - 1], parent)


def test_form1_orbit_under_random_elements(census, f2, rng):
    root = census.partition.root(s6_form().word)
    for _ in range(100):
        while True:
            m = rng.integers(0, 2, (4, 4))
            if rank(f2, m) == 4:
                break
        assert census.partition.root(act(Matrix(m, f2), s6_form()).word) == root


def test_smoothness_constant_on_orbits(census):
    rng = np.random.default_rng(3)
    parent = census.partition.parent
    picks = rng.choice(len(census.records), 20, replace=False)
    for i in picks:
        r = census.records[int(i)]
        members = np.flatnonzero(parent == r.rep) + 1
        for w in rng.choice(members, min(5, len(members)), replace=False):
            assert is_smooth(CubicForm.from_word(int(w))).smooth == r.smooth


def test_fifteen_point_analysis(census):
    checks = fifteen_point_analysis(census.partition, census.records)
    assert [c.value for c in checks[:2]] == [63, 35]
    assert checks[2].value == (28, 1)


def test_fifteen_point_analysis_raises_on_bad_records(census):
    from dataclasses import replace

    root = census.partition.root(s6_form().word)
    bad = [replace(r, smooth=False) if r.rep == root else r for r in census.records]
    with pytest.raises(CheckFailed):
        fifteen_point_analysis(census.partition, bad)


def test_s6_orbit_check(census, pgl4):
    assert s6_orbit_check(census.partition, census.records, pgl4)
    fermat = census.partition.root(fermat_form().word)
    rec = next(r for r in census.records if r.rep == fermat)
    assert not rec.passes_all_15 and rec.aut_order != 720


def test_cache_roundtrip(census, tmp_path):
    path = tmp_path / "c.bin"
    write_cache(path, census.partition, census.records)
    parent, records = read_cache(path)
    assert np.array_equal(parent.parent, census.partition.parent)
    assert records == census.records


def test_cache_rejects_bad_magic(census, tmp_path):
    path = tmp_path / "c.bin"
    write_cache(path, census.partition, census.records)
    data = bytearray(path.read_bytes())
    data[:4] = b"XXXX"
    path.write_bytes(bytes(data))
    with pytest.raises(CacheError):
        read_cache(path)


def test_cache_rejects_truncation(census, tmp_path):
    path = tmp_path / "c.bin"
    write_cache(path, census.partition, census.records)
    path.write_bytes(path.read_bytes()[:1000])
    with pytest.raises(CacheError):
        read_cache(path)


def test_build_partition_rejects_small_generating_set():
    with pytest.raises(ValueError):
        build_partition([gl_generators(4, field(1))[0]])


def test_as_json(census):
    doc = census.as_json(timings=False)
    assert doc["totals"]["forms"] == str(NFORMS)
    assert doc["max_smooth_aut"] == {"order": "720", "rep": "02a08", "unique": True}
    assert len(doc["orbits"]) == 141
    assert all(c["seconds"] == "0" for c in doc["checks"])


def test_generators_are_pgl_elements():
    assert all(isinstance(g, PglElement) for g in gl_generators(4, field(1)))
