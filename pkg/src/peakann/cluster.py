"""Noise filtering, center selection, union-find assignment, and the
end-to-end clustering pipeline.

The pipeline returns the full per-point state (densities, dependent points,
dependent distances) so that new center/noise policies can be re-applied
without recomputing the dependency forest.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .core import PointSet
from .density import compute_densities, rank_order
from .dependent import Dependents, DoublingParams, compute_dependent_points
from .index import KnnIndex, Neighborhoods, build_bruteforce
from .unionfind import UnionFind
from .vamana import build_vamana

__all__ = [
    "NoisePolicy",
    "ThresholdCenter",
    "ProductCenter",
    "LocalCenter",
    "CenterPolicy",
    "BruteForceConfig",
    "VamanaConfig",
    "IndexConfig",
    "Clustering",
    "DpcState",
    "PipelineResult",
    "find_noise",
    "find_centers_threshold",
    "find_centers_product",
    "find_centers_local",
    "assign_clusters",
    "run_pipeline",
    "reapply_policies",
]


@dataclass(frozen=True)
class NoisePolicy:
    """Points with density strictly below rho_min become singleton noise."""

    rho_min: float = 0.0


@dataclass(frozen=True)
class ThresholdCenter:
    """Centers are non-noise points with dependent distance >= delta_min."""

    delta_min: float


@dataclass(frozen=True)
class ProductCenter:
    """Centers are the n_clusters non-noise points with the largest
    delta * rho products (an infinite delta beats any finite product)."""

    n_clusters: int


@dataclass(frozen=True)
class LocalCenter:
    """Centers are non-noise points denser than all of their own neighbors."""


CenterPolicy = Union[ThresholdCenter, ProductCenter, LocalCenter]


@dataclass(frozen=True)
class BruteForceConfig:
    """Exact kNN backend."""


@dataclass(frozen=True)
class VamanaConfig:
    R: int = 32
    L_build: int = 32
    L: int = 32
    alpha: float = 1.1
    num_starts: Optional[int] = None
    seed: int = 42
    medoid_start: bool = False


IndexConfig = Union[BruteForceConfig, VamanaConfig]


@dataclass
class Clustering:
    """Canonical labels: every point carries the id of its cluster's center
    (or its own id if it is noise), independent of union-find internals."""

    labels: np.ndarray  # (n,) int64
    centers: np.ndarray  # sorted int64 ids
    noise: np.ndarray  # sorted int64 ids

    @property
    def n_clusters(self) -> int:
        return self.centers.shape[0] + self.noise.shape[0]


@dataclass
class DpcState:
    """Per-point pipeline state sufficient to re-run the policy steps."""

    rho: np.ndarray
    dependents: Dependents
    neighbors: Optional[Neighborhoods] = None

    @property
    def lam(self) -> np.ndarray:
        return self.dependents.lam

    @property
    def delta(self) -> np.ndarray:
        return self.dependents.delta


@dataclass
class PipelineResult:
    clustering: Clustering
    state: DpcState
    timings: dict = field(default_factory=dict)


def find_noise(rho: np.ndarray, policy: NoisePolicy) -> np.ndarray:
    """Ids with density strictly below rho_min, ascending."""
    return np.flatnonzero(np.asarray(rho, np.float64) < policy.rho_min).astype(np.int64)


def find_centers_threshold(dep: Dependents, non_noise: np.ndarray, delta_min: float) -> np.ndarray:
    """Non-noise ids whose dependent distance is at least delta_min."""
    non_noise = np.asarray(non_noise, np.int64)
    return np.sort(non_noise[dep.delta[non_noise] >= delta_min])


def _center_products(rho: np.ndarray, dep: Dependents, ids: np.ndarray) -> np.ndarray:
    d = dep.delta[ids]
    r = rho[ids]
    with np.errstate(invalid="ignore"):
        prod = d * r
    prod = np.where(np.isinf(d), np.inf, prod)  # infinite delta dominates
    prod = np.where(np.isnan(prod), np.where(d == 0.0, 0.0, np.inf), prod)
    return prod


def find_centers_product(rho: np.ndarray, dep: Dependents, non_noise: np.ndarray, n_c: int) -> np.ndarray:
    """The n_c non-noise ids with the largest delta * rho products.

    Ordering for ties: larger product, then larger delta, then smaller id.
    """
    if n_c < 1:
        raise ValueError(f"n_c must be >= 1, got {n_c}")
    ids = np.asarray(non_noise, np.int64)
    if n_c >= ids.shape[0]:
        if n_c > ids.shape[0]:
            warnings.warn(
                f"requested {n_c} centers but only {ids.shape[0]} non-noise points; returning all",
                stacklevel=2,
            )
        return np.sort(ids)
    prod = _center_products(np.asarray(rho, np.float64), dep, ids)
    order = np.lexsort((ids, -dep.delta[ids], -prod))
    return np.sort(ids[order[:n_c]])


def find_centers_local(rho: np.ndarray, neighbors_all: Neighborhoods, non_noise: np.ndarray) -> np.ndarray:
    """Non-noise ids that outrank every point in their own neighbor list."""
    rank = rank_order(rho)
    ids = np.asarray(non_noise, np.int64)
    best_nbr = rank[neighbors_all.ids].max(axis=1)
    return np.sort(ids[rank[ids] > best_nbr[ids]])


def assign_clusters(dep: Dependents, centers: np.ndarray, noise: np.ndarray) -> Clustering:
    """Union every remaining point with its dependent, then canonicalize.

    Edges out of centers and noise points are skipped; each resulting
    component contains exactly one center (or is a noise singleton) whose
    id becomes the component label.
    """
    n = len(dep)
    centers = np.sort(np.asarray(centers, np.int64))
    noise = np.sort(np.asarray(noise, np.int64))
    skip = np.zeros(n, dtype=bool)
    skip[centers] = True
    skip[noise] = True
    uf = UnionFind(n)
    for i in np.flatnonzero(~skip):
        target = dep.lam[i]
        if target < 0:
            raise RuntimeError(
                f"point {i} has no dependent point but is neither a center nor noise"
            )
        uf.union(int(i), int(target))
    roots = uf.find_all()
    label_of_root = np.full(n, -1, dtype=np.int64)
    for c in centers:
        rc = roots[c]
        if label_of_root[rc] >= 0:
            raise RuntimeError(f"centers {label_of_root[rc]} and {c} collapsed into one component")
        label_of_root[rc] = c
    for x in noise:
        rx = roots[x]
        if label_of_root[rx] >= 0:
            raise RuntimeError(f"noise point {x} shares a component with {label_of_root[rx]}")
        label_of_root[rx] = x
    labels = label_of_root[roots]
    if np.any(labels < 0):
        orphan = int(np.flatnonzero(labels < 0)[0])
        raise RuntimeError(f"point {orphan} is in a component with no center or noise point")
    return Clustering(labels, centers, noise)


def _select_centers(
    rho: np.ndarray,
    dep: Dependents,
    neighbors: Optional[Neighborhoods],
    non_noise: np.ndarray,
    policy: CenterPolicy,
) -> np.ndarray:
    if isinstance(policy, ThresholdCenter):
        return find_centers_threshold(dep, non_noise, policy.delta_min)
    if isinstance(policy, ProductCenter):
        return find_centers_product(rho, dep, non_noise, policy.n_clusters)
    if isinstance(policy, LocalCenter):
        if neighbors is None:
            raise ValueError("local center policy needs the neighbor lists in the state")
        return find_centers_local(rho, neighbors, non_noise)
    raise TypeError(f"unknown center policy {policy!r}")


def _apply_policies(state: DpcState, center_policy: CenterPolicy, noise_policy: NoisePolicy) -> Clustering:
    n = state.rho.shape[0]
    noise = find_noise(state.rho, noise_policy)
    is_noise = np.zeros(n, dtype=bool)
    is_noise[noise] = True
    non_noise = np.flatnonzero(~is_noise).astype(np.int64)
    centers = _select_centers(state.rho, state.dependents, state.neighbors, non_noise, center_policy)
    # points without a dependent (the densest) cannot be unioned anywhere:
    # promote them to centers unless the noise policy already took them
    orphans = np.flatnonzero(state.lam < 0)
    promote = orphans[~is_noise[orphans] & ~np.isin(orphans, centers)]
    if promote.shape[0] > 0:
        centers = np.sort(np.concatenate([centers, promote]))
    return assign_clusters(state.dependents, centers, noise)


def reapply_policies(state: DpcState, center_policy: CenterPolicy, noise_policy: NoisePolicy) -> Clustering:
    """Re-run only the policy steps over previously computed state."""
    return _apply_policies(state, center_policy, noise_policy)


def _build_index(p: PointSet, config: IndexConfig) -> KnnIndex:
    if isinstance(config, BruteForceConfig):
        return build_bruteforce(p)
    if isinstance(config, VamanaConfig):
        return build_vamana(
            p,
            R=config.R,
            L_build=config.L_build,
            alpha=config.alpha,
            num_starts=config.num_starts,
            seed=config.seed,
            medoid_start=config.medoid_start,
            query_beam=config.L,
        )
    raise TypeError(f"unknown index config {config!r}")


def run_pipeline(
    p: PointSet,
    index_config: IndexConfig,
    k: int,
    density_kind: str,
    center_policy: CenterPolicy,
    noise_policy: NoisePolicy = NoisePolicy(),
    doubling_params: Optional[DoublingParams] = None,
) -> PipelineResult:
    """Index build, kNN, densities, dependent points, policies, union-find.

    The density stage timing includes its kNN queries, matching how the
    stages split in practice (those queries dominate it).
    """
    if doubling_params is None:
        doubling_params = DoublingParams(initial_k=2 * k)
    timings: dict = {}
    t0 = time.perf_counter()
    index = _build_index(p, index_config)
    t1 = time.perf_counter()
    neighbors = index.knn_all(k)
    rho = compute_densities(density_kind, p, neighbors)
    t2 = time.perf_counter()
    dependents = compute_dependent_points(index, p, rho, neighbors, doubling_params)
    t3 = time.perf_counter()
    state = DpcState(rho=rho, dependents=dependents, neighbors=neighbors)
    clustering = _apply_policies(state, center_policy, noise_policy)
    t4 = time.perf_counter()
    timings["index"] = t1 - t0
    timings["density"] = t2 - t1
    timings["dependent"] = t3 - t2
    timings["unionfind"] = t4 - t3
    return PipelineResult(clustering=clustering, state=state, timings=timings)
