"""Clustering-quality scores: adjusted Rand index, homogeneity, completeness.

ARI is evaluated with exact integer pair counts (Python integers, so no
overflow at any dataset size) and a single final float division; the two
entropy scores share one helper, making the duality
homogeneity(p, t) == completeness(t, p) hold bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["ContingencyTable", "contingency", "ari", "homogeneity_completeness"]


@dataclass
class ContingencyTable:
    """Sparse co-occurrence counts between two labelings of the same points."""

    rows: np.ndarray  # (m,) row code of each nonempty cell
    cols: np.ndarray  # (m,) column code of each nonempty cell
    counts: np.ndarray  # (m,) cell counts
    row_sums: np.ndarray
    col_sums: np.ndarray
    n: int


def _check_pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"label vectors differ in length: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[0] == 0:
        raise ValueError("label vectors must not be empty")
    return a, b


def contingency(a, b) -> ContingencyTable:
    """Exact nonzero cell counts via code-pair aggregation."""
    a, b = _check_pair(a, b)
    _, ra = np.unique(a, return_inverse=True)
    bl, rb = np.unique(b, return_inverse=True)
    pair = ra.astype(np.int64) * len(bl) + rb
    cells, counts = np.unique(pair, return_counts=True)
    rows = cells // len(bl)
    cols = cells % len(bl)
    row_sums = np.bincount(ra, minlength=ra.max() + 1).astype(np.int64)
    col_sums = np.bincount(rb, minlength=len(bl)).astype(np.int64)
    return ContingencyTable(rows, cols, counts.astype(np.int64), row_sums, col_sums, int(a.shape[0]))


def _comb2_sum(counts: np.ndarray) -> int:
    c = counts.astype(np.int64)
    return int((c * (c - 1) // 2).sum())


def ari(a, b) -> float:
    """Adjusted Rand index between two labelings; symmetric, 1.0 for a match.

    Formula evaluated over the contingency table with integer arithmetic:
        (index - expected) / (max_index - expected)
    cleared of denominators, so the -0.5 style corner values are exact.
    """
    a, b = _check_pair(a, b)
    if a.shape[0] < 2:
        raise ValueError("ARI needs at least two points")
    ct = contingency(a, b)
    paired = _comb2_sum(ct.counts)
    pairs_a = _comb2_sum(ct.row_sums)
    pairs_b = _comb2_sum(ct.col_sums)
    total = ct.n * (ct.n - 1) // 2
    num = 2 * paired * total - 2 * pairs_a * pairs_b
    den = total * (pairs_a + pairs_b) - 2 * pairs_a * pairs_b
    if den == 0:
        # both labelings trivial (all singletons or one cluster): identical partitions
        return 1.0
    return num / den


def _dependence(score, given) -> float:
    """1 - H(score | given) / H(score), the shared entropy-ratio helper."""
    ct = contingency(score, given)
    n = float(ct.n)
    p_row = ct.row_sums[ct.row_sums > 0] / n
    h_score = float(-(p_row * np.log(p_row)).sum())
    if h_score == 0.0:
        return 1.0
    p_cell = ct.counts / n
    h_cond = float(-(p_cell * np.log(ct.counts / ct.col_sums[ct.cols])).sum())
    return 1.0 - h_cond / h_score


def homogeneity_completeness(pred, truth) -> tuple[float, float]:
    """Homogeneity (clusters hold one class) and completeness (classes stay
    in one cluster), in nats; defined as 1.0 when the reference entropy is 0."""
    pred, truth = _check_pair(pred, truth)
    return _dependence(truth, pred), _dependence(pred, truth)
