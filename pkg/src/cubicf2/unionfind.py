"""Union-find, scalar and vectorized.

:class:`DisjointSet` is the textbook structure (union by smaller root index,
path halving) for small domains.  :func:`component_labels` computes the same
partition for millions of nodes whose edges are given by index maps; its
output is exactly the parent array a fully compressed :class:`DisjointSet`
would hold, since both make the least index of every block its root.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np

__all__ = ["DisjointSet", "component_labels", "block_sizes"]


class DisjointSet:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return ra

    def roots(self) -> list[int]:
        return [self.find(x) for x in range(len(self.parent))]

    def blocks(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for x in range(len(self.parent)):
            out.setdefault(self.find(x), []).append(x)
        return out


def component_labels(n: int, maps: Iterable[np.ndarray]) -> np.ndarray:
    """Least-index label of the block of each node, for the equivalence
    generated by ``x ~ m[x]`` over every map ``m``.

    Min-label propagation with hooking and pointer jumping; every label is
    always a node of the same block and labels only decrease, so the fixed
    point is the block minimum.
    """
    maps: Sequence[np.ndarray] = [np.asarray(m, dtype=np.int64) for m in maps]
    src = np.arange(n, dtype=np.int64)
    lab = src.copy()
    while True:
        new = lab.copy()
        for m in maps:
            np.minimum(new, lab[m], out=new)
            np.minimum.at(new, m, lab)
        # hook each current root onto the smallest label seen among its members
        np.minimum.at(new, lab, new)
        while True:
            jumped = new[new]
            if np.array_equal(jumped, new):
                break
            new = jumped
        if np.array_equal(new, lab):
            return lab
        lab = new


def block_sizes(labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(sorted roots, block size per root)."""
    roots, sizes = np.unique(labels, return_counts=True)
    return roots, sizes
