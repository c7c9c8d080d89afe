"""Per-point density functions computed from each point's kNN list.

All variants map a NeighborList to a float64 density. A k-th neighbor at
distance zero (an exact duplicate) yields density +inf; ranking then falls
back to point ids, so the density order is always a strict total order.
"""

from __future__ import annotations

import numpy as np

from .core import PointSet
from .index import NeighborList, Neighborhoods

__all__ = [
    "DENSITY_KINDS",
    "density_kth",
    "density_kth_normalized",
    "density_exp_sum",
    "density_sum_exp",
    "density_sum",
    "compute_densities",
    "rank_order",
]

DENSITY_KINDS = ("kth", "kth_normalized", "exp_sum", "sum_exp", "sum")


def _kth_rows(dists: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return 1.0 / dists[:, -1]


def _exp_sum_rows(dists: np.ndarray) -> np.ndarray:
    m = dists.shape[1]
    return np.exp(-(dists * dists).sum(axis=1) / m)


def _sum_exp_rows(dists: np.ndarray) -> np.ndarray:
    m = dists.shape[1]
    return np.exp(-(dists * dists)).sum(axis=1) / m


def _sum_rows(dists: np.ndarray) -> np.ndarray:
    return -dists.sum(axis=1)


def _normalized_rows(rho: np.ndarray, neighbor_ids: np.ndarray) -> np.ndarray:
    m = neighbor_ids.shape[1]
    denom = rho[neighbor_ids].sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = rho * m / denom
    out = np.where(denom == 0.0, np.inf, out)
    # inf/inf: a duplicate-dense point among duplicate-dense neighbors
    return np.where(np.isnan(out), np.inf, out)


def _require_neighbors(neighbors: NeighborList) -> np.ndarray:
    if len(neighbors) == 0:
        raise ValueError("density needs at least one neighbor")
    return neighbors.dists[None, :]


def density_kth(neighbors: NeighborList) -> float:
    """Inverse distance to the furthest (k-th) neighbor; +inf for duplicates."""
    return float(_kth_rows(_require_neighbors(neighbors))[0])


def density_exp_sum(neighbors: NeighborList) -> float:
    """exp of the negated mean squared neighbor distance."""
    return float(_exp_sum_rows(_require_neighbors(neighbors))[0])


def density_sum_exp(neighbors: NeighborList) -> float:
    """Mean of exp(-distance^2) over the neighbors (kernel-density flavor)."""
    return float(_sum_exp_rows(_require_neighbors(neighbors))[0])


def density_sum(neighbors: NeighborList) -> float:
    """Negated sum of neighbor distances (simple baseline)."""
    return float(_sum_rows(_require_neighbors(neighbors))[0])


def density_kth_normalized(rho: np.ndarray, neighbors_all: Neighborhoods) -> np.ndarray:
    """Rescale kth densities by k over the summed densities of each point's neighbors."""
    rho = np.asarray(rho, dtype=np.float64)
    if neighbors_all.k == 0:
        raise ValueError("density needs at least one neighbor")
    return _normalized_rows(rho, neighbors_all.ids)


def compute_densities(kind: str, p: PointSet, neighbors_all: Neighborhoods) -> np.ndarray:
    """Densities of all points under the chosen variant (one vectorized pass).

    The single-point functions above slice the same row kernels, so both
    paths produce bit-identical values.
    """
    if kind not in DENSITY_KINDS:
        raise ValueError(f"unknown density kind {kind!r}; expected one of {DENSITY_KINDS}")
    if neighbors_all.n != p.n:
        raise ValueError(f"neighborhoods cover {neighbors_all.n} points, point set has {p.n}")
    if neighbors_all.k == 0:
        raise ValueError("density needs at least one neighbor per point (is n == 1?)")
    dists = neighbors_all.dists
    if kind == "kth":
        return _kth_rows(dists)
    if kind == "kth_normalized":
        return _normalized_rows(_kth_rows(dists), neighbors_all.ids)
    if kind == "exp_sum":
        return _exp_sum_rows(dists)
    if kind == "sum_exp":
        return _sum_exp_rows(dists)
    return _sum_rows(dists)


def rank_order(rho: np.ndarray) -> np.ndarray:
    """Strict density ranks: higher rank is denser, ties go to the smaller id.

    Every density comparison downstream is `rank[j] > rank[i]`, which makes
    'denser than' a total order even among +inf or equal densities.
    """
    rho = np.asarray(rho, dtype=np.float64)
    if np.isnan(rho).any():
        raise ValueError("densities must not contain NaN")
    n = rho.shape[0]
    order = np.lexsort((np.arange(n), -rho))
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n, 0, -1)
    return rank
