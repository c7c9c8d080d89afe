"""Point storage and the Euclidean distance kernel shared by every stage.

Coordinates are stored as float32 (the layout of common vector corpora);
every distance is accumulated in float64 so that orderings are stable and
identical regardless of how work is split across threads.
"""

from __future__ import annotations

import numpy as np

from ._kernels import point_sqdist

__all__ = ["PointSet", "distance", "squared_distance"]


class PointSet:
    """Immutable n x d matrix of float32 points, identified by row index.

    The backing array is made read-only: concurrent readers never need
    synchronization, and indexes built over the set cannot be invalidated.
    """

    def __init__(self, data: np.ndarray):
        arr = np.ascontiguousarray(data, dtype=np.float32)
        if arr.ndim != 2:
            raise ValueError(f"points must be a 2-D array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"need at least one point and one dimension, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise ValueError(f"non-finite coordinate at point {bad[0]}, dimension {bad[1]}")
        arr.flags.writeable = False
        self.data = arr

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"PointSet(n={self.n}, d={self.d})"

    def check_id(self, i: int) -> int:
        i = int(i)
        if not 0 <= i < self.n:
            raise IndexError(f"point id {i} out of range for {self.n} points")
        return i


def squared_distance(p: PointSet, i: int, j: int) -> float:
    """Squared Euclidean distance between points i and j, float64 accumulation."""
    return float(point_sqdist(p.data, p.check_id(i), p.check_id(j)))


def distance(p: PointSet, i: int, j: int) -> float:
    """Euclidean distance between points i and j.

    Exactly symmetric: the accumulation order is identical for (i, j) and
    (j, i) because each term is a squared coordinate difference.
    """
    return float(np.sqrt(squared_distance(p, i, j)))
