import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import peakann as pk
from conftest import A, B, C, D, E, F


class TestPointSet:
    def test_shape_and_dtype(self, fig_points):
        assert fig_points.n == 6
        assert fig_points.d == 2
        assert fig_points.data.dtype == np.float32
        assert len(fig_points) == 6

    def test_rejects_empty_and_bad_shapes(self):
        with pytest.raises(ValueError):
            pk.PointSet(np.empty((0, 3), np.float32))
        with pytest.raises(ValueError):
            pk.PointSet(np.empty((3, 0), np.float32))
        with pytest.raises(ValueError):
            pk.PointSet(np.zeros(5, np.float32))

    def test_rejects_non_finite(self):
        bad = np.zeros((2, 2), np.float32)
        bad[1, 1] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            pk.PointSet(bad)
        bad[1, 1] = np.inf
        with pytest.raises(ValueError, match="non-finite"):
            pk.PointSet(bad)

    def test_immutable_after_load(self, fig_points):
        with pytest.raises(ValueError):
            fig_points.data[0, 0] = 9.0


class TestDistance:
    def test_b_to_c_is_one(self, fig_points):
        assert pk.distance(fig_points, B, C) == 1.0

    def test_identity_is_zero(self, fig_points):
        for i in range(6):
            assert pk.distance(fig_points, i, i) == 0.0

    def test_a_to_c_is_sqrt2(self, fig_points):
        assert pk.distance(fig_points, A, C) == pytest.approx(np.sqrt(2.0), abs=1e-15)

    def test_out_of_range_raises(self, fig_points):
        with pytest.raises(IndexError):
            pk.distance(fig_points, 0, 6)
        with pytest.raises(IndexError):
            pk.squared_distance(fig_points, -7, 0)


class TestSquaredDistance:
    def test_b_to_c(self, fig_points):
        assert pk.squared_distance(fig_points, B, C) == 1.0

    def test_a_to_c(self, fig_points):
        assert pk.squared_distance(fig_points, A, C) == 2.0

    def test_identity(self, fig_points):
        assert pk.squared_distance(fig_points, D, D) == 0.0


coord = st.floats(min_value=-100.0, max_value=100.0, allow_nan=False, width=32)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(coord, min_size=3, max_size=3), min_size=2, max_size=8), st.data())
def test_symmetry_exact(rows, data):
    p = pk.PointSet(np.array(rows, np.float32))
    i = data.draw(st.integers(0, p.n - 1))
    j = data.draw(st.integers(0, p.n - 1))
    assert pk.distance(p, i, j) == pk.distance(p, j, i)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(coord, min_size=4, max_size=4), min_size=3, max_size=6))
def test_squared_matches_square(rows):
    p = pk.PointSet(np.array(rows, np.float32))
    for i in range(p.n):
        for j in range(p.n):
            d = pk.distance(p, i, j)
            assert pk.squared_distance(p, i, j) == pytest.approx(d * d, rel=1e-6)


def test_triangle_inequality_random_triples():
    rng = np.random.default_rng(2024)
    p = pk.PointSet(rng.standard_normal((60, 16)).astype(np.float32))
    for _ in range(300):
        i, j, l = rng.integers(0, p.n, size=3)
        assert pk.distance(p, i, j) <= pk.distance(p, i, l) + pk.distance(p, l, j) + 1e-6


def test_zero_iff_coincident():
    pts = np.array([[1.5, 2.5], [1.5, 2.5], [1.5, 2.6]], np.float32)
    p = pk.PointSet(pts)
    assert pk.distance(p, 0, 1) == 0.0
    assert pk.distance(p, 0, 2) > 0.0
