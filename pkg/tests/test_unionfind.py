import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from cubicf2.unionfind import DisjointSet, block_sizes, component_labels


def test_disjoint_set_basics():
    ds = DisjointSet(6)
    ds.union(4, 2)
    ds.union(2, 5)
    ds.union(0, 1)
    assert ds.find(5) == 2
    assert ds.roots() == [0, 0, 2, 3, 2, 2]
    assert ds.blocks() == {0: [0, 1], 2: [2, 4, 5], 3: [3]}


def _oracle(n, maps):
    ds = DisjointSet(n)
    for m in maps:
        for x, y in enumerate(m):
            ds.union(x, int(y))
    return np.array(ds.roots())


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 60).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.lists(st.integers(0, n - 1), min_size=n, max_size=n),
                                             min_size=1, max_size=3))))
def test_component_labels_match_scalar(case):
    n, maps = case
    maps = [np.array(m) for m in maps]
    assert np.array_equal(component_labels(n, maps), _oracle(n, maps))


def test_component_labels_permutations(rng):
    n = 5000
    maps = [rng.permutation(n) for _ in range(2)]
    assert np.array_equal(component_labels(n, maps), _oracle(n, maps))


def test_long_chain_converges():
    n = 1 << 12
    shift = np.roll(np.arange(n), -1)  # one big cycle
    labels = component_labels(n, [shift])
    assert not labels.any()


def test_block_sizes():
    roots, sizes = block_sizes(np.array([0, 0, 2, 2, 2, 5]))
    assert roots.tolist() == [0, 2, 5] and sizes.tolist() == [2, 3, 1]
