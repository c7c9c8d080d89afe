"""Numba kernels behind the index, graph search, and dependent-point stages.

Conventions shared by every kernel here:

- coordinates are float32, all distance accumulation is float64;
- distances are kept *squared* inside kernels (monotone in the true
  distance) and only square-rooted at the API boundary;
- candidate orderings always break distance ties by smaller point id,
  which is what makes results reproducible across thread counts;
- parallel loops write to disjoint output rows and never reduce across
  iterations, so any thread count produces identical output.
"""

import numpy as np
from numba import njit, prange

# ---------------------------------------------------------------------------
# distance primitives


@njit(cache=True, inline="always")
def _sqdist_to(data, j, q):
    """Squared distance from float64 query vector q to data row j."""
    acc = 0.0
    for t in range(data.shape[1]):
        diff = q[t] - np.float64(data[j, t])
        acc += diff * diff
    return acc


@njit(cache=True)
def point_sqdist(data, i, j):
    """Squared distance between rows i and j; exactly symmetric."""
    acc = 0.0
    for t in range(data.shape[1]):
        diff = np.float64(data[i, t]) - np.float64(data[j, t])
        acc += diff * diff
    return acc


@njit(cache=True)
def sqdists_to_many(data, i, ids):
    """Squared distances from row i to each row in ids."""
    q = data[i].astype(np.float64)
    out = np.empty(ids.shape[0], np.float64)
    for t in range(ids.shape[0]):
        out[t] = _sqdist_to(data, ids[t], q)
    return out


# ---------------------------------------------------------------------------
# exact k-nearest-neighbor selection


@njit(cache=True)
def _select_k_from_row(row, kk, out_ids, out_d):
    """Top-kk of a squared-distance row: k-th smallest, filter, stable sort.

    Boundary ties at the k-th distance are admitted in ascending id order.
    """
    n = row.shape[0]
    part = np.partition(row, kk - 1)
    thresh = part[kk - 1]
    cnt = 0
    for j in range(n):
        if row[j] < thresh:
            out_ids[cnt] = j
            out_d[cnt] = row[j]
            cnt += 1
    for j in range(n):
        if cnt >= kk:
            break
        if row[j] == thresh:
            out_ids[cnt] = j
            out_d[cnt] = row[j]
            cnt += 1
    # survivors are in id order; a stable sort on distance yields (dist, id)
    o = np.argsort(out_d[:kk], kind="mergesort")
    ids_sorted = out_ids[:kk][o]
    d_sorted = out_d[:kk][o]
    for t in range(kk):
        out_ids[t] = ids_sorted[t]
        out_d[t] = d_sorted[t]


@njit(cache=True, parallel=True)
def brute_knn_batch(data, qids, k):
    """Exact kNN for member queries qids, excluding each query's own id."""
    n = data.shape[0]
    kk = min(k, n - 1)
    m = qids.shape[0]
    out_ids = np.full((m, kk), -1, np.int64)
    out_d = np.full((m, kk), np.inf, np.float64)
    if kk == 0:
        return out_ids, out_d
    for t in prange(m):
        i = qids[t]
        q = data[i].astype(np.float64)
        row = np.empty(n, np.float64)
        for j in range(n):
            row[j] = _sqdist_to(data, j, q)
        row[i] = np.inf
        _select_k_from_row(row, kk, out_ids[t], out_d[t])
    return out_ids, out_d


@njit(cache=True)
def brute_knn_vector(data, q, k):
    """Exact kNN for an arbitrary query vector (no self-exclusion)."""
    n = data.shape[0]
    kk = min(k, n)
    out_ids = np.full(kk, -1, np.int64)
    out_d = np.full(kk, np.inf, np.float64)
    row = np.empty(n, np.float64)
    for j in range(n):
        row[j] = _sqdist_to(data, j, q)
    _select_k_from_row(row, kk, out_ids, out_d)
    return out_ids, out_d


# ---------------------------------------------------------------------------
# greedy beam search over a bounded-degree graph


@njit(cache=True, inline="always")
def _beam_insert(beam_ids, beam_d, bl, L, w, dw, inbeam):
    """Insert (dw, w) into the (dist, id)-sorted beam, evicting the worst."""
    pos = bl
    for t in range(bl):
        if dw < beam_d[t] or (dw == beam_d[t] and w < beam_ids[t]):
            pos = t
            break
    if bl < L:
        for t in range(bl, pos, -1):
            beam_ids[t] = beam_ids[t - 1]
            beam_d[t] = beam_d[t - 1]
        beam_ids[pos] = w
        beam_d[pos] = dw
        inbeam[w] = 1
        return bl + 1
    if pos >= L:
        return bl
    inbeam[beam_ids[L - 1]] = 0
    for t in range(L - 1, pos, -1):
        beam_ids[t] = beam_ids[t - 1]
        beam_d[t] = beam_d[t - 1]
    beam_ids[pos] = w
    beam_d[pos] = dw
    inbeam[w] = 1
    return bl


@njit(cache=True)
def _beam_search(data, adj, deg, starts, q, L, beam_ids, beam_d, vis_ids, vis_d, visited, inbeam):
    """Greedy beam search: repeatedly expand the closest unvisited beam member.

    Terminates once every beam member is visited; each iteration visits one
    new vertex, so the loop is bounded by n. Returns (beam size, visit count).
    """
    bl = 0
    for si in range(starts.shape[0]):
        s = starts[si]
        if inbeam[s]:
            continue
        bl = _beam_insert(beam_ids, beam_d, bl, L, s, _sqdist_to(data, s, q), inbeam)
    vl = 0
    while True:
        pos = -1
        for t in range(bl):
            if visited[beam_ids[t]] == 0:
                pos = t
                break
        if pos < 0:
            break
        p = beam_ids[pos]
        visited[p] = 1
        vis_ids[vl] = p
        vis_d[vl] = beam_d[pos]
        vl += 1
        for e in range(deg[p]):
            w = adj[p, e]
            if inbeam[w]:
                continue
            bl = _beam_insert(beam_ids, beam_d, bl, L, w, _sqdist_to(data, w, q), inbeam)
    return bl, vl


@njit(cache=True)
def _collect_candidates(beam_ids, beam_d, bl, vis_ids, vis_d, vl, visited):
    """Union of visited set and unvisited beam remainder, (dist, id)-sorted."""
    total = vl
    for t in range(bl):
        if visited[beam_ids[t]] == 0:
            total += 1
    ids = np.empty(total, np.int64)
    dd = np.empty(total, np.float64)
    c = 0
    for t in range(vl):
        ids[c] = vis_ids[t]
        dd[c] = vis_d[t]
        c += 1
    for t in range(bl):
        w = beam_ids[t]
        if visited[w] == 0:
            ids[c] = w
            dd[c] = beam_d[t]
            c += 1
    o1 = np.argsort(ids, kind="mergesort")
    ids = ids[o1]
    dd = dd[o1]
    o2 = np.argsort(dd, kind="mergesort")
    return ids[o2], dd[o2]


@njit(cache=True)
def beam_search_single(data, adj, deg, starts, q, L):
    """One beam search; returns ((dist, id)-sorted candidates, visited set)."""
    n = data.shape[0]
    beam_ids = np.empty(L, np.int64)
    beam_d = np.empty(L, np.float64)
    vis_ids = np.empty(n, np.int64)
    vis_d = np.empty(n, np.float64)
    visited = np.zeros(n, np.uint8)
    inbeam = np.zeros(n, np.uint8)
    bl, vl = _beam_search(data, adj, deg, starts, q, L, beam_ids, beam_d, vis_ids, vis_d, visited, inbeam)
    cand_ids, cand_d = _collect_candidates(beam_ids, beam_d, bl, vis_ids, vis_d, vl, visited)
    return cand_ids, cand_d, vis_ids[:vl].copy(), vis_d[:vl].copy()


@njit(cache=True, parallel=True)
def beam_knn_batch(data, adj, deg, starts, qids, L, k):
    """Beam-search kNN for member queries; counts report how many were found."""
    n = data.shape[0]
    kk = min(k, n - 1)
    m = qids.shape[0]
    out_ids = np.full((m, kk), -1, np.int64)
    out_d = np.full((m, kk), np.inf, np.float64)
    counts = np.zeros(m, np.int64)
    if kk == 0:
        return out_ids, out_d, counts
    for t in prange(m):
        i = qids[t]
        q = data[i].astype(np.float64)
        beam_ids = np.empty(L, np.int64)
        beam_d = np.empty(L, np.float64)
        vis_ids = np.empty(n, np.int64)
        vis_d = np.empty(n, np.float64)
        visited = np.zeros(n, np.uint8)
        inbeam = np.zeros(n, np.uint8)
        bl, vl = _beam_search(data, adj, deg, starts, q, L, beam_ids, beam_d, vis_ids, vis_d, visited, inbeam)
        cand_ids, cand_d = _collect_candidates(beam_ids, beam_d, bl, vis_ids, vis_d, vl, visited)
        c = 0
        for x in range(cand_ids.shape[0]):
            if cand_ids[x] == i:
                continue
            out_ids[t, c] = cand_ids[x]
            out_d[t, c] = cand_d[x]
            c += 1
            if c == kk:
                break
        counts[t] = c
    return out_ids, out_d, counts


# ---------------------------------------------------------------------------
# robust pruning and graph construction


@njit(cache=True)
def _canon_candidates(cand_ids, cand_d, p):
    """Drop p and duplicates, return candidates sorted by (dist, id)."""
    m = cand_ids.shape[0]
    o1 = np.argsort(cand_ids, kind="mergesort")
    ids = np.empty(m, np.int64)
    dd = np.empty(m, np.float64)
    c = 0
    prev = np.int64(-1)
    for t in range(m):
        v = cand_ids[o1[t]]
        if v == prev or v == p:
            continue
        ids[c] = v
        dd[c] = cand_d[o1[t]]
        c += 1
        prev = v
    o2 = np.argsort(dd[:c], kind="mergesort")
    return ids[:c][o2], dd[:c][o2]


@njit(cache=True)
def _robust_prune(data, ids, dd, alpha2, R, out_row):
    """Select up to R out-neighbors from (dist, id)-sorted candidates.

    Picks the closest remaining candidate, then discards every candidate a
    factor alpha closer to it than to the pruned vertex (compared in the
    squared domain, hence alpha2 = alpha**2).
    """
    c = ids.shape[0]
    alive = np.ones(c, np.uint8)
    sel = 0
    for t in range(c):
        if alive[t] == 0:
            continue
        pstar = ids[t]
        out_row[sel] = pstar
        sel += 1
        if sel >= R:
            break
        pq = data[pstar].astype(np.float64)
        for u in range(t + 1, c):
            if alive[u] == 0:
                continue
            if alpha2 * _sqdist_to(data, ids[u], pq) <= dd[u]:
                alive[u] = 0
    return sel


@njit(cache=True)
def robust_prune_standalone(data, p, cand_ids, cand_d, cur_ids, alpha, R):
    """Prune for one vertex: merge candidates with its current out-list."""
    dcount = cur_ids.shape[0]
    m = cand_ids.shape[0]
    all_ids = np.empty(m + dcount, np.int64)
    all_d = np.empty(m + dcount, np.float64)
    q = data[p].astype(np.float64)
    for t in range(m):
        all_ids[t] = cand_ids[t]
        all_d[t] = cand_d[t]
    for t in range(dcount):
        all_ids[m + t] = cur_ids[t]
        all_d[m + t] = _sqdist_to(data, cur_ids[t], q)
    ids, dd = _canon_candidates(all_ids, all_d, p)
    out_row = np.full(R, -1, np.int64)
    sel = _robust_prune(data, ids, dd, alpha * alpha, R, out_row)
    return out_row[:sel].copy()


@njit(cache=True, parallel=True)
def build_batch(data, adj, deg, starts, bids, L_build, alpha2, R):
    """Beam-search every batch point against the current graph and prune.

    Reads the adjacency snapshot only; out-lists are returned, not written,
    so all points in a batch see the same graph regardless of scheduling.
    """
    n = data.shape[0]
    m = bids.shape[0]
    new_ids = np.full((m, R), -1, np.int32)
    new_len = np.zeros(m, np.int64)
    for t in prange(m):
        p = bids[t]
        q = data[p].astype(np.float64)
        beam_ids = np.empty(L_build, np.int64)
        beam_d = np.empty(L_build, np.float64)
        vis_ids = np.empty(n, np.int64)
        vis_d = np.empty(n, np.float64)
        visited = np.zeros(n, np.uint8)
        inbeam = np.zeros(n, np.uint8)
        _, vl = _beam_search(data, adj, deg, starts, q, L_build, beam_ids, beam_d, vis_ids, vis_d, visited, inbeam)
        dcount = deg[p]
        cand_ids = np.empty(vl + dcount, np.int64)
        cand_d = np.empty(vl + dcount, np.float64)
        for x in range(vl):
            cand_ids[x] = vis_ids[x]
            cand_d[x] = vis_d[x]
        for x in range(dcount):
            w = adj[p, x]
            cand_ids[vl + x] = w
            cand_d[vl + x] = _sqdist_to(data, w, q)
        ids, dd = _canon_candidates(cand_ids, cand_d, p)
        out_row = np.full(R, -1, np.int64)
        sel = _robust_prune(data, ids, dd, alpha2, R, out_row)
        for x in range(sel):
            new_ids[t, x] = out_row[x]
        new_len[t] = sel
    return new_ids, new_len


@njit(cache=True, parallel=True)
def apply_reverse_edges(data, adj, deg, targets, offsets, adds, alpha2, R):
    """Add reverse edges target -> p, pruning any vertex pushed past degree R.

    Each target vertex owns its adjacency row, so groups update in parallel.
    Rows are kept (dist, id)-sorted to make the graph canonical.
    """
    for t in prange(targets.shape[0]):
        u = targets[t]
        qu = data[u].astype(np.float64)
        dcount = deg[u]
        extra = offsets[t + 1] - offsets[t]
        cand_ids = np.empty(dcount + extra, np.int64)
        cand_d = np.empty(dcount + extra, np.float64)
        c = 0
        for x in range(dcount):
            w = adj[u, x]
            cand_ids[c] = w
            cand_d[c] = _sqdist_to(data, w, qu)
            c += 1
        for x in range(offsets[t], offsets[t + 1]):
            w = adds[x]
            cand_ids[c] = w
            cand_d[c] = _sqdist_to(data, w, qu)
            c += 1
        ids, dd = _canon_candidates(cand_ids, cand_d, u)
        if ids.shape[0] <= R:
            sel = ids.shape[0]
            for x in range(sel):
                adj[u, x] = ids[x]
        else:
            out_row = np.full(R, -1, np.int64)
            sel = _robust_prune(data, ids, dd, alpha2, R, out_row)
            for x in range(sel):
                adj[u, x] = out_row[x]
        for x in range(sel, R):
            adj[u, x] = -1
        deg[u] = sel


@njit(cache=True)
def nearest_to_centroid(data):
    """Id of the point closest to the coordinate mean (medoid stand-in)."""
    n, d = data.shape
    cen = np.zeros(d, np.float64)
    for j in range(n):
        for t in range(d):
            cen[t] += np.float64(data[j, t])
    for t in range(d):
        cen[t] /= n
    best = np.inf
    bid = -1
    for j in range(n):
        dj = _sqdist_to(data, j, cen)
        if dj < best:
            best = dj
            bid = j
    return bid


# ---------------------------------------------------------------------------
# dependent-point helpers


@njit(cache=True, parallel=True)
def dp_scan_all(data, rank, qids):
    """For each query, the closest strictly denser point over the whole set."""
    m = qids.shape[0]
    out_id = np.full(m, -1, np.int64)
    out_d = np.full(m, np.inf, np.float64)
    for t in prange(m):
        i = qids[t]
        q = data[i].astype(np.float64)
        ri = rank[i]
        best = np.inf
        bestid = np.int64(-1)
        for j in range(data.shape[0]):
            if rank[j] > ri:
                dj = _sqdist_to(data, j, q)
                if dj < best or (dj == best and j < bestid):
                    best = dj
                    bestid = j
        out_id[t] = bestid
        out_d[t] = best
    return out_id, out_d
