"""Array-based union-find with union by size and path compression.

Components depend only on the multiset of union operations, not on their
order, so parallel callers racing on disjoint unions still converge to the
same partition; labels are canonicalized downstream and never depend on
which element ends up as the internal representative.
"""

from __future__ import annotations

import numpy as np

__all__ = ["UnionFind"]


class UnionFind:
    def __init__(self, n: int):
        self.parent = np.arange(n, dtype=np.int64)
        self.size = np.ones(n, dtype=np.int64)

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return int(root)

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]

    def find_all(self) -> np.ndarray:
        """Representative of every element (fully compressed)."""
        return np.array([self.find(i) for i in range(self.parent.shape[0])], dtype=np.int64)
