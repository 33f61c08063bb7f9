import numpy as np
import pytest

from cubicf2.forms import CubicForm, act, fermat_form, s6_form
from cubicf2.gf2k import Matrix, NotInvertible, field, matmul
from cubicf2.groups import (
    OMEGA,
    LimitExceeded,
    PglElement,
    closure,
    conjugacy_classes,
    generate,
    gl_generators,
    min_index_normal_abelian,
    normal_subgroups,
    pgl,
    pgl_order,
    stabilizer,
    stabilizer_mask,
    subgroup,
    symplectic_group,
    verify_normal,
)
from cubicf2.recognize import cyclic_group, perm_group, symmetric_group


@pytest.mark.parametrize("n,k,order", [(2, 1, 6), (3, 1, 168), (2, 2, 60), (2, 3, 504), (4, 1, 20160)])
def test_pgl_orders(n, k, order):
    assert pgl_order(n, 1 << k) == order
    g = pgl(n, field(k))
    assert g.order == order
    assert g.index(g.element(0)) == 0


def test_pgl3_f4_order():
    assert pgl(3, field(2)).order == 60480


def test_elements_are_normalized_and_distinct(pgl4):
    assert len(np.unique(pgl4.codes, axis=0)) == pgl4.order
    assert np.array_equal(pgl4.codes[0], np.eye(4, dtype=np.uint8).ravel())


def test_multiplication_matches_matmul(pgl4, rng, f2):
    i = rng.integers(0, pgl4.order, 200)
    j = rng.integers(0, pgl4.order, 200)
    prod = pgl4.mul_many(i, j)
    mats = pgl4.codes.reshape(-1, 4, 4)
    direct = matmul(f2, mats[i], mats[j])
    assert np.array_equal(pgl4.codes[prod].reshape(-1, 4, 4), direct)


def test_inverses_and_orders(pgl4):
    inv = pgl4.inverses
    assert np.all(pgl4.mul_many(np.arange(pgl4.order), inv) == 0)
    orders = pgl4.element_orders
    assert orders[0] == 1
    # element orders of PGL(4,2) = A8
    assert set(orders.tolist()) == {1, 2, 3, 4, 5, 6, 7, 15}


def test_single_inverse_without_table(f2):
    g = pgl(3, f2)
    assert g._inverses is None
    single = [g.inverse(i) for i in range(g.order)]
    assert g._inverses is None
    assert single == g.inverses.tolist()


def test_pgl_scalars_quotiented():
    spec = field(2)
    a = PglElement(Matrix([[2, 0], [0, 2]], spec))
    assert a == PglElement(Matrix.identity(2, spec))
    with pytest.raises(NotInvertible):
        PglElement(Matrix([[1, 1], [1, 1]], spec))


def test_closure_limit():
    with pytest.raises(LimitExceeded):
        closure(gl_generators(4, field(1)), limit=1000)


def test_symplectic_equals_stabilizer(pgl4, aut1):
    sp = symplectic_group(OMEGA, pgl4)
    assert sp.order == 720 == aut1.order
    assert np.array_equal(np.sort(pgl4.index_of(sp.codes)), np.sort(pgl4.index_of(aut1.codes)))
    assert set(map(bytes, sp.codes)) == set(map(bytes, aut1.codes))


def test_stabilizer_members_fix_form(aut1):
    f = s6_form()
    for i in range(0, aut1.order, 37):
        assert act(aut1.element(i).mat, f) == f


def _embed(m2):
    m = np.eye(4, dtype=np.uint8)
    m[:2, :2] = m2
    return m


def _projective_key(f):
    # scale so the first nonzero coefficient is 1
    spec = f.spec
    lead = next(c for c in f.coeffs if c)
    s = spec.inv(lead)
    return tuple(spec.mul(s, c) for c in f.coeffs)


def test_stabilizer_generic_path_orbit_count():
    # GL_2(F_4) on x, y inside PGL_4(F_4); the non-F_2 path must obey orbit-stabilizer
    spec = field(2)
    gens = [PglElement(Matrix(_embed(e.mat.entries), spec)) for e in gl_generators(2, spec)]
    g = closure(gens)
    assert g.order == 180
    f = CubicForm.from_terms({(3, 0, 0, 0): 1, (0, 3, 0, 0): 1, (0, 0, 3, 0): 1}, spec)
    stab = int(stabilizer_mask(g, f).sum())
    orbit = {_projective_key(act(g.element(i).mat, f)) for i in range(g.order)}
    assert stab * len(orbit) == g.order
    assert stab > 1


def test_orbit_stabilizer_samples(pgl4, census):
    for r in census.records[::10]:
        assert stabilizer(pgl4, r.form).order * r.orbit_size == 20160


def test_fermat_stabilizer(pgl4):
    # permutations of the four variables (S4) times diagonal scalars (trivial over F2)
    # and more; orbit-stabilizer pins it to the census value
    assert stabilizer(pgl4, fermat_form()).order == 48


def test_conjugacy_classes_of_s6(aut1):
    cc = conjugacy_classes(aut1)
    assert sorted(cc.sizes) == [1, 15, 15, 40, 40, 45, 90, 90, 120, 120, 144]
    assert sum(cc.sizes) == 720


def test_class_sizes_divide_order(pgl4):
    cc = conjugacy_classes(pgl4)
    assert len(cc) == 14  # A8
    assert all(pgl4.order % s == 0 for s in cc.sizes)


@pytest.mark.parametrize("make,orders", [
    (lambda: symmetric_group(6), [1, 360, 720]),
    (lambda: symmetric_group(4), [1, 4, 12, 24]),
    (lambda: pgl(3, field(1)), [1, 168]),
    (lambda: cyclic_group(6), [1, 2, 3, 6]),
])
def test_normal_subgroup_orders(make, orders):
    g = make()
    lat = normal_subgroups(g)
    assert lat.orders == orders
    for n in lat.subgroups:
        assert verify_normal(g, n)


def test_min_index_normal_abelian():
    assert min_index_normal_abelian(symmetric_group(4)) == 6
    assert min_index_normal_abelian(cyclic_group(5)) == 1
    assert min_index_normal_abelian(pgl(3, field(1))) == 168


def test_min_index_stabilizer(aut1):
    assert min_index_normal_abelian(aut1) == 720


def test_pgl3_f4_has_no_normal_abelian():
    g = pgl(3, field(2))
    assert min_index_normal_abelian(g) == 60480


def test_generate_and_subgroup():
    s4 = symmetric_group(4)
    mask = generate(s4, [s4.generators[0]])
    assert mask.sum() == 2
    h = subgroup(s4, mask)
    assert h.order == 2


def test_perm_compose_convention():
    g = perm_group([[1, 2, 0]], 3)
    a = g.codes[g.generators[0]]
    assert g.domain.compose(a[None], a[None])[0].tolist() == [a[a[i]] for i in range(3)]
