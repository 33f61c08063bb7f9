import numpy as np
import pytest

from cubicf2.gf2k import field
from cubicf2.groups import OMEGA, pgl, subgroup, symplectic_group
from cubicf2.recognize import (
    IsoWitness,
    action_on_points,
    count_pointless_forms,
    cyclic_group,
    is_isomorphic,
    perm_group,
    small_generating_set,
    symmetric_group,
    uniqueness_certificates,
    verify_witness,
)


def klein_four():
    return perm_group([[1, 0, 3, 2], [2, 3, 0, 1]], 4, name="V4")


@pytest.mark.parametrize("n,order", [(1, 1), (3, 6), (5, 120), (6, 720)])
def test_symmetric_orders(n, order):
    assert symmetric_group(n).order == order


def test_stabilizer_is_s6(aut1):
    w = is_isomorphic(aut1, symmetric_group(6))
    assert isinstance(w, IsoWitness) and w.verified
    assert verify_witness(aut1, symmetric_group(6), w)


def test_symplectic_is_s6(pgl4):
    assert is_isomorphic(symplectic_group(OMEGA, pgl4), symmetric_group(6)) is not None


def test_self_isomorphism():
    s6 = symmetric_group(6)
    assert is_isomorphic(s6, s6) is not None


def test_c4_not_v4():
    assert is_isomorphic(cyclic_group(4), klein_four()) is None


def test_s6_not_s5_x_c6():
    s5_c6 = perm_group([[1, 0, 2, 3, 4, 5, 6, 7, 8, 9, 10],
                        [1, 2, 3, 4, 0, 5, 6, 7, 8, 9, 10],
                        [0, 1, 2, 3, 4, 6, 7, 8, 9, 10, 5]], 11)
    assert s5_c6.order == 720
    assert is_isomorphic(s5_c6, symmetric_group(6)) is None


def test_pgl2_f2_is_s3():
    assert is_isomorphic(pgl(2, field(1)), symmetric_group(3)) is not None


def test_tampered_witness_rejected(aut1):
    s6 = symmetric_group(6)
    w = is_isomorphic(aut1, s6)
    bad = IsoWitness(w.generators, w.images, w.mapping.copy(), True)
    bad.mapping[[1, 2]] = bad.mapping[[2, 1]]
    assert not verify_witness(aut1, s6, bad)


def test_small_generating_set(aut1):
    from cubicf2.groups import generate

    gens = small_generating_set(aut1)
    assert len(gens) <= 2 and generate(aut1, gens).all()


def test_point_action(aut1, pgl4):
    a = action_on_points(aut1)
    assert a.faithful and a.transitive and a.orbit_sizes == [15]
    assert np.all(np.sort(a.images, axis=1) == np.arange(15))
    w = int(pgl4.index_of(np.asarray(OMEGA, dtype=np.uint8).reshape(1, 16))[0])
    omega = subgroup(pgl4, np.isin(np.arange(pgl4.order), [0, w]))
    b = action_on_points(omega)
    assert sum(b.orbit_sizes) == 15 and max(b.orbit_sizes) <= 2


def test_point_action_requires_pgl42():
    with pytest.raises(ValueError):
        action_on_points(symmetric_group(3))


def test_certificates(aut1):
    checks = uniqueness_certificates(aut1)
    assert [c.name[0] for c in checks] == ["a", "b", "c", "d"]
    assert all(c.passed for c in checks)


def test_pointless_scan():
    assert count_pointless_forms() == 0
