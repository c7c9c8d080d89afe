"""k-nearest-neighbor index abstraction and the exact brute-force backend.

A NeighborList is always sorted ascending by (distance, id), never contains
the query's own id when the query is a member point, and holds exactly
min(k, n - 1) entries for member queries.
"""

from __future__ import annotations

from typing import Iterator, NamedTuple, Union

import numpy as np

from . import _kernels
from .core import PointSet

__all__ = [
    "Neighbor",
    "NeighborList",
    "Neighborhoods",
    "KnnIndex",
    "BruteForceIndex",
    "build_bruteforce",
    "find_knn",
    "knn_all",
]

Query = Union[int, np.ndarray]


class Neighbor(NamedTuple):
    id: int
    dist: float


class NeighborList:
    """Ordered (distance, id) neighbors of one query."""

    __slots__ = ("ids", "dists")

    def __init__(self, ids: np.ndarray, dists: np.ndarray):
        self.ids = np.asarray(ids, dtype=np.int64)
        self.dists = np.asarray(dists, dtype=np.float64)

    def __len__(self) -> int:
        return self.ids.shape[0]

    def __iter__(self) -> Iterator[Neighbor]:
        for i, d in zip(self.ids, self.dists):
            yield Neighbor(int(i), float(d))

    def __getitem__(self, idx: int) -> Neighbor:
        return Neighbor(int(self.ids[idx]), float(self.dists[idx]))

    def __repr__(self) -> str:
        return f"NeighborList({list(self)!r})"


class Neighborhoods:
    """kNN lists for every point, stored as dense (n, k) arrays.

    Element i is the NeighborList of point i; all rows have the same width
    because member queries always return exactly min(k, n - 1) entries.
    """

    __slots__ = ("ids", "dists")

    def __init__(self, ids: np.ndarray, dists: np.ndarray):
        self.ids = ids
        self.dists = dists

    @property
    def n(self) -> int:
        return self.ids.shape[0]

    @property
    def k(self) -> int:
        return self.ids.shape[1]

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> NeighborList:
        return NeighborList(self.ids[i], self.dists[i])


def _as_query_vector(p: PointSet, query: Query) -> tuple[np.ndarray, int]:
    """Normalize a query to (float64 vector, member id or -1)."""
    if isinstance(query, (int, np.integer)):
        qid = p.check_id(query)
        return p.data[qid].astype(np.float64), qid
    vec = np.asarray(query, dtype=np.float64)
    if vec.ndim != 1 or vec.shape[0] != p.d:
        raise ValueError(f"query vector must have shape ({p.d},), got {vec.shape}")
    return vec, -1


class KnnIndex:
    """Interface: build once, then answer read-only kNN queries concurrently."""

    points: PointSet

    def find_knn(self, query: Query, k: int) -> NeighborList:
        raise NotImplementedError

    def knn_batch(self, qids: np.ndarray, k: int) -> Neighborhoods:
        """kNN lists for a batch of member queries, parallel over queries."""
        raise NotImplementedError

    def knn_all(self, k: int) -> Neighborhoods:
        """kNN lists of all member points."""
        return self.knn_batch(np.arange(self.points.n, dtype=np.int64), k)


class BruteForceIndex(KnnIndex):
    """Exact backend: no index state at all, every query scans the dataset.

    Per query: find the k-th smallest distance by selection, filter the
    points below it, and sort the survivors by (distance, id).
    """

    def __init__(self, points: PointSet):
        self.points = points

    def find_knn(self, query: Query, k: int) -> NeighborList:
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        vec, qid = _as_query_vector(self.points, query)
        if qid >= 0:
            ids, sqd = _kernels.brute_knn_batch(self.points.data, np.array([qid], np.int64), k)
            return NeighborList(ids[0], np.sqrt(sqd[0]))
        ids, sqd = _kernels.brute_knn_vector(self.points.data, vec, k)
        return NeighborList(ids, np.sqrt(sqd))

    def knn_batch(self, qids: np.ndarray, k: int) -> Neighborhoods:
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        ids, sqd = _kernels.brute_knn_batch(self.points.data, np.asarray(qids, np.int64), k)
        return Neighborhoods(ids, np.sqrt(sqd))


def build_bruteforce(p: PointSet) -> BruteForceIndex:
    """Exact kNN 'index' (O(1) build; all work happens at query time)."""
    return BruteForceIndex(p)


def find_knn(g: KnnIndex, query: Query, k: int) -> NeighborList:
    return g.find_knn(query, k)


def knn_all(g: KnnIndex, k: int) -> Neighborhoods:
    return g.knn_all(k)
