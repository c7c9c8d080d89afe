"""Parallel density-peaks clustering on exact or graph-based approximate
k-nearest-neighbor indexes, with clustering-quality metrics and dataset IO.

Submodules import lazily so the CLI can configure threading before any
compiled kernel is loaded.
"""

__version__ = "0.1.0"

_EXPORTS = {
    "PointSet": "core",
    "distance": "core",
    "squared_distance": "core",
    "Neighbor": "index",
    "NeighborList": "index",
    "Neighborhoods": "index",
    "KnnIndex": "index",
    "BruteForceIndex": "index",
    "build_bruteforce": "index",
    "find_knn": "index",
    "knn_all": "index",
    "GraphIndex": "vamana",
    "VamanaIndex": "vamana",
    "beam_search": "vamana",
    "robust_prune": "vamana",
    "build_vamana": "vamana",
    "find_knn_with_fallback": "vamana",
    "save_graph": "vamana",
    "load_graph": "vamana",
    "compute_densities": "density",
    "rank_order": "density",
    "DoublingParams": "dependent",
    "Dependents": "dependent",
    "dp_brute_force": "dependent",
    "compute_dependent_points": "dependent",
    "NoisePolicy": "cluster",
    "ThresholdCenter": "cluster",
    "ProductCenter": "cluster",
    "LocalCenter": "cluster",
    "BruteForceConfig": "cluster",
    "VamanaConfig": "cluster",
    "Clustering": "cluster",
    "DpcState": "cluster",
    "PipelineResult": "cluster",
    "find_noise": "cluster",
    "find_centers_threshold": "cluster",
    "find_centers_product": "cluster",
    "find_centers_local": "cluster",
    "assign_clusters": "cluster",
    "run_pipeline": "cluster",
    "reapply_policies": "cluster",
    "ContingencyTable": "metrics",
    "contingency": "metrics",
    "ari": "metrics",
    "homogeneity_completeness": "metrics",
    "DataFormatError": "data",
    "read_vectors": "data",
    "read_labels": "data",
    "write_clustering": "data",
    "GaussianSpec": "data",
    "generate_gaussian": "data",
    "set_num_threads": "_config",
    "get_num_threads": "_config",
    "max_num_threads": "_config",
}

__all__ = sorted(_EXPORTS) + ["__version__"]


def __getattr__(name):
    module = _EXPORTS.get(name)
    if module is None:
        raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
    import importlib

    return getattr(importlib.import_module(f".{module}", __name__), name)


def __dir__():
    return __all__
