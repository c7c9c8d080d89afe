import os

# raise the numba thread cap before anything imports numba, so thread-count
# determinism tests can actually run multi-threaded on small CI boxes
os.environ.setdefault("NUMBA_NUM_THREADS", "8")

import numpy as np
import pytest

import peakann as pk
from peakann.cluster import BruteForceConfig, NoisePolicy, ProductCenter, VamanaConfig
from peakann.dependent import DoublingParams

# the 6-point running example: a..f = ids 0..5
FIG_COORDS = np.array([[5, 1], [4, 3], [4, 2], [1, 2], [1, 0], [0, 3]], dtype=np.float32)
A, B, C, D, E, F = range(6)


@pytest.fixture(scope="session")
def fig_points() -> pk.PointSet:
    return pk.PointSet(FIG_COORDS)


@pytest.fixture(scope="session")
def fig_graph(fig_points):
    """The undirected toy graph index: f-d, d-e, f-c, c-b, a-b."""
    adj = np.full((6, 4), -1, np.int32)
    deg = np.zeros(6, np.int32)
    for u, v in [(F, D), (D, E), (F, C), (C, B), (A, B)]:
        adj[u, deg[u]] = v
        deg[u] += 1
        adj[v, deg[v]] = u
        deg[v] += 1
    return pk.GraphIndex(fig_points, adj, deg, 4, np.array([0], np.int64), 1.0)


GAUSS_N = 10_000
GAUSS_C = 10


@pytest.fixture(scope="session")
def gaussian_instance():
    """The desk-scale benchmark instance shared by the acceptance criteria."""
    points, labels = pk.generate_gaussian(pk.GaussianSpec(n=GAUSS_N, c=GAUSS_C, d=128, seed=1009))
    return points, labels


@pytest.fixture(scope="session")
def gaussian_exact_run(gaussian_instance):
    points, _ = gaussian_instance
    return pk.run_pipeline(
        points,
        BruteForceConfig(),
        k=16,
        density_kind="kth",
        center_policy=ProductCenter(GAUSS_C),
        noise_policy=NoisePolicy(0.0),
        doubling_params=DoublingParams(initial_k=32, threshold=0),
    )


@pytest.fixture(scope="session")
def gaussian_vamana_index(gaussian_instance):
    points, _ = gaussian_instance
    return pk.build_vamana(points, R=32, L_build=32, alpha=1.1, seed=1009, query_beam=32)


@pytest.fixture(scope="session")
def gaussian_vamana_run(gaussian_instance):
    points, _ = gaussian_instance
    return pk.run_pipeline(
        points,
        VamanaConfig(R=32, L_build=32, L=32, alpha=1.1, seed=1009),
        k=16,
        density_kind="kth",
        center_policy=ProductCenter(GAUSS_C),
        noise_policy=NoisePolicy(0.0),
        doubling_params=DoublingParams(initial_k=32, threshold=300),
    )
