import numpy as np
import pytest

import peakann as pk
from peakann.density import (
    density_exp_sum,
    density_kth,
    density_kth_normalized,
    density_sum,
    density_sum_exp,
    rank_order,
)
from peakann.index import NeighborList, Neighborhoods


def nl(ids, dists):
    return NeighborList(np.array(ids, np.int64), np.array(dists, np.float64))


@pytest.fixture(scope="module")
def fig_nb(fig_points):
    return pk.build_bruteforce(fig_points).knn_all(1)


class TestKth:
    def test_point_e(self):
        assert density_kth(nl([3], [2.0])) == 0.5

    def test_point_a(self):
        assert density_kth(nl([2], [np.sqrt(2.0)])) == pytest.approx(1 / np.sqrt(2.0), abs=1e-15)

    def test_duplicate_gives_infinity(self):
        assert density_kth(nl([7], [0.0])) == np.inf

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            density_kth(nl([], []))

    def test_uses_furthest_neighbor(self):
        assert density_kth(nl([1, 2, 3], [0.5, 1.0, 4.0])) == 0.25


class TestKthNormalized:
    def test_regular_simplex_all_ones(self):
        # 4 points pairwise equidistant in 3-D: every normalized density is 1
        pts = pk.PointSet(np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], np.float32))
        nb = pk.build_bruteforce(pts).knn_all(3)
        rho = pk.compute_densities("kth", pts, nb)
        out = density_kth_normalized(rho, nb)
        assert np.allclose(out, 1.0, atol=1e-12)

    def test_figure_value_for_e(self, fig_points, fig_nb):
        rho = pk.compute_densities("kth", fig_points, fig_nb)
        out = density_kth_normalized(rho, fig_nb)
        # rho_e / rho_d = (1/2) / (1/sqrt(2))
        assert out[4] == pytest.approx(np.sqrt(2.0) / 2.0, abs=1e-12)

    def test_recompute_identical(self, fig_points, fig_nb):
        rho = pk.compute_densities("kth_normalized", fig_points, fig_nb)
        again = pk.compute_densities("kth_normalized", fig_points, fig_nb)
        assert np.array_equal(np.argsort(rho), np.argsort(again))
        assert np.array_equal(rho, again)

    def test_duplicate_cluster_stays_infinite(self):
        pts = pk.PointSet(np.array([[0, 0], [0, 0], [0, 0], [5, 5]], np.float32))
        nb = pk.build_bruteforce(pts).knn_all(2)
        out = pk.compute_densities("kth_normalized", pts, nb)
        assert not np.isnan(out).any()
        assert np.isinf(out[0]) and np.isinf(out[1]) and np.isinf(out[2])


class TestExpSum:
    def test_all_zero_distances(self):
        assert density_exp_sum(nl([1, 2], [0.0, 0.0])) == 1.0

    def test_single_neighbor_at_two(self):
        assert density_exp_sum(nl([1], [2.0])) == pytest.approx(np.exp(-4.0), rel=1e-12)

    def test_two_neighbors(self):
        assert density_exp_sum(nl([1, 2], [1.0, np.sqrt(3.0)])) == pytest.approx(np.exp(-2.0), rel=1e-12)


class TestSumExp:
    def test_all_zero_distances(self):
        assert density_sum_exp(nl([1, 2, 3], [0.0, 0.0, 0.0])) == 1.0

    def test_single_neighbor_at_two(self):
        assert density_sum_exp(nl([1], [2.0])) == pytest.approx(np.exp(-4.0), rel=1e-12)

    def test_huge_distance_underflows(self):
        assert density_sum_exp(nl([1, 2], [0.0, 100.0])) == pytest.approx(0.5, abs=1e-12)


class TestSum:
    def test_zero_distances(self):
        assert density_sum(nl([1, 2], [0.0, 0.0])) == 0.0

    def test_figure_point_e(self):
        assert density_sum(nl([3], [2.0])) == -2.0

    def test_never_positive(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            d = rng.uniform(0, 10, size=rng.integers(1, 6))
            assert density_sum(nl(np.arange(len(d)), d)) <= 0.0


class TestComputeDensities:
    def test_figure_kth_vector(self, fig_points, fig_nb):
        rho = pk.compute_densities("kth", fig_points, fig_nb)
        want = np.array([1 / np.sqrt(2), 1.0, 1.0, 1 / np.sqrt(2), 0.5, 1 / np.sqrt(2)])
        assert np.allclose(rho, want, atol=1e-12)

    def test_single_point_rejected(self):
        p = pk.PointSet(np.array([[1.0, 1.0]], np.float32))
        nb = pk.build_bruteforce(p).knn_all(3)
        with pytest.raises(ValueError):
            pk.compute_densities("kth", p, nb)

    def test_unknown_kind_rejected(self, fig_points, fig_nb):
        with pytest.raises(ValueError):
            pk.compute_densities("gaussian", fig_points, fig_nb)

    @pytest.mark.parametrize("kind", ["kth", "kth_normalized", "exp_sum", "sum_exp", "sum"])
    def test_batch_matches_per_point(self, kind, fig_points):
        nb = pk.build_bruteforce(fig_points).knn_all(3)
        rho = pk.compute_densities(kind, fig_points, nb)
        if kind == "kth_normalized":
            base = pk.compute_densities("kth", fig_points, nb)
            assert np.array_equal(rho, density_kth_normalized(base, nb))
            return
        scalar = {
            "kth": density_kth,
            "exp_sum": density_exp_sum,
            "sum_exp": density_sum_exp,
            "sum": density_sum,
        }[kind]
        for i in range(fig_points.n):
            assert rho[i] == scalar(nb[i])

    @pytest.mark.parametrize("kind", ["exp_sum", "sum_exp"])
    def test_exp_kinds_bounded(self, kind):
        rng = np.random.default_rng(8)
        pts = pk.PointSet(rng.standard_normal((50, 6)).astype(np.float32))
        nb = pk.build_bruteforce(pts).knn_all(5)
        rho = pk.compute_densities(kind, pts, nb)
        assert np.all(rho > 0.0)
        assert np.all(rho <= 1.0)

    def test_kth_antimonotone_in_kth_distance(self):
        rng = np.random.default_rng(10)
        for _ in range(50):
            d1 = np.sort(rng.uniform(0.01, 5.0, size=4))
            d2 = d1.copy()
            d2[-1] *= rng.uniform(0.2, 1.0)  # shrink the k-th distance
            d2 = np.sort(d2)
            assert density_kth(nl(np.arange(4), d2)) >= density_kth(nl(np.arange(4), d1))


class TestRankOrder:
    def test_figure_ranking(self, fig_points, fig_nb):
        rho = pk.compute_densities("kth", fig_points, fig_nb)
        rank = rank_order(rho)
        # high-to-low with id tie-breaks: b, c, a, d, f, e
        assert list(np.argsort(-rank)) == [1, 2, 0, 3, 5, 4]

    def test_strict_total_order(self):
        rho = np.array([np.inf, 1.0, np.inf, 1.0, 0.0])
        rank = rank_order(rho)
        assert sorted(rank) == [1, 2, 3, 4, 5]
        assert rank[0] > rank[2]  # equal densities: smaller id is denser
        assert rank[1] > rank[3]

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            rank_order(np.array([1.0, np.nan]))
