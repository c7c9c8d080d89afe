"""Graph-based ANNS backend: greedy beam search, robust pruning, batch build.

The graph is a bounded-degree directed adjacency structure searched with a
greedy beam. Construction inserts points in batches of doubling size; every
point in a batch searches the same graph snapshot, then out-lists and
reverse edges are applied, so the built graph does not depend on the
scheduling of workers.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import PointSet
from .index import KnnIndex, Neighbor, NeighborList, Neighborhoods, Query, _as_query_vector

__all__ = [
    "GraphIndex",
    "VamanaIndex",
    "beam_search",
    "robust_prune",
    "build_vamana",
    "find_knn_with_fallback",
    "save_graph",
    "load_graph",
]

GRAPH_MAGIC = b"PECG"


@dataclass
class GraphIndex:
    """Directed out-neighbor lists with degree bound R plus search seeds."""

    points: PointSet
    adjacency: np.ndarray  # (n, R) int32, row i holds deg[i] valid entries
    degrees: np.ndarray  # (n,) int32
    R: int
    start_points: np.ndarray  # (s,) int64
    alpha: float

    def out_neighbors(self, i: int) -> np.ndarray:
        return self.adjacency[i, : self.degrees[i]].astype(np.int64)

    def max_degree(self) -> int:
        return int(self.degrees.max())


def _normalize_starts(g: GraphIndex, starts) -> np.ndarray:
    arr = np.asarray(list(starts) if not isinstance(starts, np.ndarray) else starts, dtype=np.int64)
    if arr.ndim != 1 or arr.shape[0] == 0:
        raise ValueError("starts must be a non-empty set of point ids")
    for s in arr:
        g.points.check_id(int(s))
    return arr


def beam_search(
    g: GraphIndex, query: Query, starts, L: int, k: int
) -> tuple[NeighborList, list[Neighbor]]:
    """Greedy beam search; returns the k best of beam-union-visited, and the visited set.

    The query's own id (for member queries) is dropped only when assembling
    the returned NeighborList; it may sit in the beam during the walk. Fewer
    than k entries come back when the walk traverses fewer points.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if L < k:
        raise ValueError(f"beam width L={L} must be >= k={k}")
    vec, qid = _as_query_vector(g.points, query)
    sarr = _normalize_starts(g, starts)
    cand_ids, cand_d, vis_ids, vis_d = _kernels.beam_search_single(
        g.points.data, g.adjacency, g.degrees, sarr, vec, L
    )
    keep = cand_ids != qid
    top_ids = cand_ids[keep][:k]
    top_d = np.sqrt(cand_d[keep][:k])
    visited = [Neighbor(int(i), float(np.sqrt(d))) for i, d in zip(vis_ids, vis_d)]
    return NeighborList(top_ids, top_d), visited


def robust_prune(g: GraphIndex, p: int, candidates, alpha: float, R: int) -> np.ndarray:
    """New out-list for p: nearest-first selection with alpha-slack pruning.

    Candidates are merged with p's current out-neighbors and p itself is
    dropped; after each selection p*, every remaining candidate within
    alpha slack of p* (closer to p* than to p, up to the factor) is pruned.
    """
    if alpha < 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    if R < 1:
        raise ValueError(f"R must be >= 1, got {R}")
    p = g.points.check_id(p)
    cand = list(candidates)
    cand_ids = np.array([int(c.id) for c in cand], dtype=np.int64)
    cand_d = np.array([float(c.dist) ** 2 for c in cand], dtype=np.float64)
    cur = g.adjacency[p, : g.degrees[p]].astype(np.int64)
    return _kernels.robust_prune_standalone(g.points.data, p, cand_ids, cand_d, cur, float(alpha), R)


def build_vamana(
    p: PointSet,
    R: int = 32,
    L_build: int = 32,
    alpha: float = 1.1,
    num_starts: int | None = None,
    seed: int = 42,
    medoid_start: bool = False,
    query_beam: int | None = None,
) -> "VamanaIndex":
    """Construct the search graph by batched insertion of doubling size.

    Every point in a batch beam-searches the current graph from the start
    set, prunes its visited set into an out-list, and contributes reverse
    edges; vertices pushed past degree R are re-pruned. By default the
    start set is ceil(sqrt(n)) ids sampled with the run seed; a single
    centroid-nearest start (the classic choice) is available via
    medoid_start, but sampled starts avoid getting trapped in one cluster.
    """
    if R < 2:
        raise ValueError(f"R must be >= 2, got {R}")
    if L_build < 1:
        raise ValueError(f"L_build must be >= 1, got {L_build}")
    if alpha < 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    n = p.n
    rng = np.random.default_rng(seed)
    if medoid_start:
        starts = np.array([_kernels.nearest_to_centroid(p.data)], dtype=np.int64)
    else:
        s = int(np.ceil(np.sqrt(n))) if num_starts is None else int(num_starts)
        if not 1 <= s <= n:
            raise ValueError(f"num_starts must be in [1, {n}], got {s}")
        starts = np.sort(rng.choice(n, size=s, replace=False).astype(np.int64))

    adj = np.full((n, R), -1, dtype=np.int32)
    deg = np.zeros(n, dtype=np.int32)
    order = rng.permutation(n).astype(np.int64)
    alpha2 = float(alpha) * float(alpha)

    lo = 0
    batch = 1
    while lo < n:
        hi = min(n, lo + batch)
        bids = order[lo:hi]
        new_ids, new_len = _kernels.build_batch(p.data, adj, deg, starts, bids, L_build, alpha2, R)
        for t in range(bids.shape[0]):
            ln = int(new_len[t])
            adj[bids[t], :ln] = new_ids[t, :ln]
            adj[bids[t], ln:] = -1
            deg[bids[t]] = ln
        # reverse edges target -> source, grouped per target vertex
        mask = new_ids >= 0
        flat_u = new_ids[mask].astype(np.int64)
        flat_p = np.repeat(bids, new_len)
        if flat_u.shape[0] > 0:
            o = np.argsort(flat_u, kind="stable")
            flat_u = flat_u[o]
            flat_p = flat_p[o]
            targets, first = np.unique(flat_u, return_index=True)
            offsets = np.append(first, flat_u.shape[0]).astype(np.int64)
            _kernels.apply_reverse_edges(p.data, adj, deg, targets, offsets, flat_p, alpha2, R)
        lo = hi
        batch *= 2

    graph = GraphIndex(p, adj, deg, R, starts, float(alpha))
    return VamanaIndex(graph, query_beam if query_beam is not None else L_build)


def find_knn_with_fallback(g: GraphIndex, query: Query, k: int, L: int) -> NeighborList:
    """Beam-search kNN with L = max(L, k); exact brute force if it comes up short.

    Short results happen on disconnected graphs or near-duplicate regions
    where the walk traverses fewer than k distinct points.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    L = max(L, k)
    vec, qid = _as_query_vector(g.points, query)
    n = g.points.n
    want = min(k, n - 1) if qid >= 0 else min(k, n)
    cand_ids, cand_d, _, _ = _kernels.beam_search_single(g.points.data, g.adjacency, g.degrees, g.start_points, vec, L)
    keep = cand_ids != qid
    top_ids = cand_ids[keep][:k]
    top_d = cand_d[keep][:k]
    if top_ids.shape[0] < want:
        if qid >= 0:
            ids, sqd = _kernels.brute_knn_batch(g.points.data, np.array([qid], np.int64), k)
            return NeighborList(ids[0], np.sqrt(sqd[0]))
        ids, sqd = _kernels.brute_knn_vector(g.points.data, vec, k)
        return NeighborList(ids, np.sqrt(sqd))
    return NeighborList(top_ids, np.sqrt(top_d))


class VamanaIndex(KnnIndex):
    """KnnIndex adapter: beam queries over a built graph, with brute fallback."""

    def __init__(self, graph: GraphIndex, query_beam: int):
        if query_beam < 1:
            raise ValueError(f"query_beam must be >= 1, got {query_beam}")
        self.graph = graph
        self.points = graph.points
        self.query_beam = query_beam

    def find_knn(self, query: Query, k: int) -> NeighborList:
        return find_knn_with_fallback(self.graph, query, k, self.query_beam)

    def knn_batch(self, qids: np.ndarray, k: int) -> Neighborhoods:
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        qids = np.asarray(qids, np.int64)
        g = self.graph
        L = max(self.query_beam, k)
        ids, sqd, counts = _kernels.beam_knn_batch(g.points.data, g.adjacency, g.degrees, g.start_points, qids, L, k)
        kk = ids.shape[1]
        short = np.flatnonzero(counts < kk)
        if short.shape[0] > 0:
            b_ids, b_sqd = _kernels.brute_knn_batch(g.points.data, qids[short], k)
            ids[short] = b_ids
            sqd[short] = b_sqd
        return Neighborhoods(ids, np.sqrt(sqd))


def save_graph(g: GraphIndex, path) -> None:
    """Serialize: magic, u32 n/R/num_starts, u32 start ids, then per vertex
    a u32 degree followed by u32 neighbor ids. All little-endian."""
    n = g.points.n
    with open(path, "wb") as f:
        f.write(GRAPH_MAGIC)
        f.write(struct.pack("<III", n, g.R, g.start_points.shape[0]))
        f.write(g.start_points.astype("<u4").tobytes())
        for i in range(n):
            d = int(g.degrees[i])
            f.write(struct.pack("<I", d))
            f.write(g.adjacency[i, :d].astype("<u4").tobytes())


def load_graph(path, points: PointSet, alpha: float = 1.0) -> GraphIndex:
    """Read a graph written by save_graph; alpha is not stored in the format."""
    with open(path, "rb") as f:
        blob = f.read()
    if blob[:4] != GRAPH_MAGIC:
        raise ValueError(f"{path}: bad magic {blob[:4]!r}")
    n, R, ns = struct.unpack_from("<III", blob, 4)
    if n != points.n:
        raise ValueError(f"{path}: graph has {n} vertices but points has {points.n}")
    off = 16
    starts = np.frombuffer(blob, "<u4", ns, off).astype(np.int64)
    off += 4 * ns
    adj = np.full((n, R), -1, dtype=np.int32)
    deg = np.zeros(n, dtype=np.int32)
    for i in range(n):
        (d,) = struct.unpack_from("<I", blob, off)
        off += 4
        if d > R:
            raise ValueError(f"{path}: vertex {i} degree {d} exceeds bound {R}")
        adj[i, :d] = np.frombuffer(blob, "<u4", d, off).astype(np.int32)
        deg[i] = d
        off += 4 * d
    if off != len(blob):
        raise ValueError(f"{path}: {len(blob) - off} trailing bytes")
    return GraphIndex(points, adj, deg, R, starts, alpha)
