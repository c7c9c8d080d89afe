"""Dependent points: each point's nearest neighbor of strictly higher density.

Three phases, each a parallel pass:

1. search each point's own kNN list;
2. doubling rounds: unresolved points re-query the index with a widening
   k (starting at initial_k, doubling, capped at n - 1) until few enough
   points remain;
3. the stragglers scan the whole dataset exactly.

'Denser' always means the tie-broken rank comparison, so with an
approximate index the reported dependent is still guaranteed denser; only
its distance may exceed the true minimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import _kernels
from .core import PointSet
from .density import rank_order
from .index import KnnIndex, Neighbor, Neighborhoods

__all__ = ["DoublingParams", "DependentInfo", "Dependents", "dp_brute_force", "compute_dependent_points"]


@dataclass(frozen=True)
class DoublingParams:
    """initial_k is the first kNN width of the doubling rounds (must exceed
    the density k); once at most `threshold` points remain unresolved they
    are finished by exact full scans instead of further rounds."""

    initial_k: int
    threshold: int = 300

    def validated_against(self, k: int) -> "DoublingParams":
        if self.initial_k <= k:
            raise ValueError(f"initial_k must be > k, got initial_k={self.initial_k}, k={k}")
        if self.threshold < 0:
            raise ValueError(f"threshold must be >= 0, got {self.threshold}")
        return self


class DependentInfo(NamedTuple):
    lam: Optional[int]
    delta: float


class Dependents:
    """Per-point dependent ids (-1 when absent) and dependent distances."""

    __slots__ = ("lam", "delta")

    def __init__(self, lam: np.ndarray, delta: np.ndarray):
        self.lam = lam
        self.delta = delta

    def __len__(self) -> int:
        return self.lam.shape[0]

    def __getitem__(self, i: int) -> DependentInfo:
        l = int(self.lam[i])
        return DependentInfo(l if l >= 0 else None, float(self.delta[i]))


def dp_brute_force(i: int, candidates: Sequence[Neighbor], rho: np.ndarray) -> Optional[Neighbor]:
    """Closest candidate ranked denser than i, by (dist, id); None if none."""
    key_i = (rho[i], -i)
    best: Optional[Neighbor] = None
    for nb in candidates:
        if (rho[nb.id], -nb.id) > key_i and (best is None or (nb.dist, nb.id) < (best.dist, best.id)):
            best = nb
    return best


def _resolve_from_lists(rank: np.ndarray, qids: np.ndarray, nbh: Neighborhoods, lam: np.ndarray, delta: np.ndarray) -> np.ndarray:
    """Fill dependents findable inside the given kNN lists; return unresolved qids.

    Rows are (dist, id)-sorted, so the first denser entry is the closest one.
    """
    if nbh.k == 0:
        return qids
    denser = rank[nbh.ids] > rank[qids][:, None]
    found = denser.any(axis=1)
    first = denser.argmax(axis=1)
    hit = qids[found]
    lam[hit] = nbh.ids[found, first[found]]
    delta[hit] = nbh.dists[found, first[found]]
    return qids[~found]


def compute_dependent_points(
    g: KnnIndex,
    p: PointSet,
    rho: np.ndarray,
    neighbors_all: Neighborhoods,
    params: DoublingParams,
) -> Dependents:
    """Dependent point and distance for every point; the globally densest
    point keeps lam=None, delta=+inf and is skipped by every phase."""
    n = p.n
    rho = np.asarray(rho, dtype=np.float64)
    if rho.shape[0] != n or neighbors_all.n != n:
        raise ValueError("rho and neighbors_all must cover the whole point set")
    rank = rank_order(rho)
    lam = np.full(n, -1, dtype=np.int64)
    delta = np.full(n, np.inf, dtype=np.float64)
    top = int(np.argmax(rank))

    all_ids = np.arange(n, dtype=np.int64)
    unfinished = _resolve_from_lists(rank, all_ids, neighbors_all, lam, delta)
    unfinished = unfinished[unfinished != top]

    if n > 1:
        kdep = params.validated_against(neighbors_all.k).initial_k
        while unfinished.shape[0] > params.threshold:
            kq = min(kdep, n - 1)
            nbh = g.knn_batch(unfinished, kq)
            unfinished = _resolve_from_lists(rank, unfinished, nbh, lam, delta)
            if kq >= n - 1:
                break
            kdep *= 2

    if unfinished.shape[0] > 0:
        scan_ids, scan_sqd = _kernels.dp_scan_all(p.data, rank, unfinished)
        lam[unfinished] = scan_ids
        delta[unfinished] = np.sqrt(scan_sqd)

    return Dependents(lam, delta)
