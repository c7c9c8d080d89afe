"""Dataset ingestion and output: fvecs / f32bin vectors, label files, and the
synthetic Gaussian-mixture generator used for benchmarking.

All randomness flows from numpy's seedable PCG64 generator; each synthetic
cluster draws from its own spawned seed so the output is reproducible
regardless of how the clusters are generated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import PointSet

__all__ = [
    "DataFormatError",
    "read_vectors",
    "read_fvecs",
    "read_f32bin",
    "write_fvecs",
    "write_f32bin",
    "read_labels",
    "write_labels",
    "write_clustering",
    "GaussianSpec",
    "generate_gaussian",
]


class DataFormatError(ValueError):
    """Malformed vector or label file."""


def _check_finite(arr: np.ndarray, path) -> np.ndarray:
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise DataFormatError(f"{path}: non-finite coordinate at point {bad[0]}, dimension {bad[1]}")
    return arr


def read_fvecs(path) -> PointSet:
    """fvecs: repeated [int32 d][float32 x d] records, little-endian."""
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) == 0:
        raise DataFormatError(f"{path}: empty file (byte offset 0)")
    if len(blob) % 4 != 0:
        raise DataFormatError(f"{path}: truncated record at byte offset {len(blob) - len(blob) % 4}")
    words = np.frombuffer(blob, dtype="<i4")
    d = int(words[0])
    if d < 1:
        raise DataFormatError(f"{path}: dimension {d} at byte offset 0")
    stride = d + 1
    if words.shape[0] % stride != 0:
        raise DataFormatError(
            f"{path}: truncated record at byte offset {(words.shape[0] // stride) * stride * 4}"
        )
    dims = words[::stride]
    bad = np.flatnonzero(dims != d)
    if bad.shape[0] > 0:
        raise DataFormatError(
            f"{path}: dimension {int(dims[bad[0]])} != {d} at byte offset {int(bad[0]) * stride * 4}"
        )
    vecs = words.view("<f4").reshape(-1, stride)[:, 1:]
    return PointSet(_check_finite(vecs, path))


def read_f32bin(path) -> PointSet:
    """f32bin: [uint32 n][uint32 d] header then n*d float32, little-endian."""
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < 8:
        raise DataFormatError(f"{path}: missing 8-byte header (file has {len(blob)} bytes)")
    n, d = (int(x) for x in np.frombuffer(blob, "<u4", 2))
    if n < 1 or d < 1:
        raise DataFormatError(f"{path}: header declares n={n}, d={d}")
    expect = 8 + 4 * n * d
    if len(blob) != expect:
        raise DataFormatError(f"{path}: expected {expect} bytes for n={n}, d={d}, found {len(blob)}")
    vecs = np.frombuffer(blob, "<f4", n * d, 8).reshape(n, d)
    return PointSet(_check_finite(vecs, path))


def read_vectors(path, fmt: str = "auto") -> PointSet:
    """Load a vector file; fmt 'auto' dispatches on the file extension."""
    if fmt == "auto":
        s = str(path)
        if s.endswith(".fvecs"):
            fmt = "fvecs"
        elif s.endswith(".f32bin") or s.endswith(".bin"):
            fmt = "f32bin"
        else:
            raise DataFormatError(f"{path}: cannot infer format from extension; pass fvecs or f32bin")
    if fmt == "fvecs":
        return read_fvecs(path)
    if fmt == "f32bin":
        return read_f32bin(path)
    raise ValueError(f"unknown vector format {fmt!r}")


def write_fvecs(points: PointSet | np.ndarray, path) -> None:
    arr = points.data if isinstance(points, PointSet) else np.asarray(points, np.float32)
    n, d = arr.shape
    rec = np.empty((n, d + 1), dtype="<i4")
    rec[:, 0] = d
    rec[:, 1:] = np.ascontiguousarray(arr, "<f4").view("<i4")
    with open(path, "wb") as f:
        f.write(rec.tobytes())


def write_f32bin(points: PointSet | np.ndarray, path) -> None:
    arr = points.data if isinstance(points, PointSet) else np.asarray(points, np.float32)
    with open(path, "wb") as f:
        f.write(np.array(arr.shape, "<u4").tobytes())
        f.write(np.ascontiguousarray(arr, "<f4").tobytes())


def read_labels(path) -> np.ndarray:
    """One integer label per line; blank lines are ignored."""
    labels = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            tok = line.strip()
            if not tok:
                continue
            try:
                labels.append(int(tok))
            except ValueError:
                raise DataFormatError(f"{path}: line {lineno}: not an integer: {tok!r}") from None
    return np.array(labels, dtype=np.int64)


def write_labels(labels: np.ndarray, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for v in labels:
            f.write(f"{int(v)}\n")


def write_clustering(clustering, path, sidecar=None) -> None:
    """Write canonical labels in point order; optionally a JSON sidecar with
    the center and noise id lists."""
    write_labels(clustering.labels, path)
    if sidecar is not None:
        with open(sidecar, "w", encoding="utf-8") as f:
            json.dump(
                {
                    "centers": [int(c) for c in clustering.centers],
                    "noise": [int(x) for x in clustering.noise],
                },
                f,
            )
            f.write("\n")


@dataclass(frozen=True)
class GaussianSpec:
    """c cluster centers uniform on [0, 1]^d; each cluster holds n/c points
    drawn per-coordinate from Normal(center, variance)."""

    n: int
    c: int
    d: int = 128
    variance: float = 0.05
    seed: int = 42


def generate_gaussian(spec: GaussianSpec) -> tuple[PointSet, np.ndarray]:
    """Synthetic mixture with planted labels; bit-identical for a given seed."""
    if spec.c < 1:
        raise ValueError(f"need at least one cluster, got c={spec.c}")
    if spec.c > spec.n:
        raise ValueError(f"more clusters than points: c={spec.c} > n={spec.n}")
    if spec.d < 1:
        raise ValueError(f"need at least one dimension, got d={spec.d}")
    ss = np.random.SeedSequence(spec.seed)
    children = ss.spawn(spec.c + 1)
    centers = np.random.default_rng(children[0]).uniform(0.0, 1.0, (spec.c, spec.d))
    base, extra = divmod(spec.n, spec.c)
    sigma = float(np.sqrt(spec.variance))
    parts = []
    labels = np.empty(spec.n, dtype=np.int64)
    at = 0
    for i in range(spec.c):
        m = base + (1 if i < extra else 0)
        rng = np.random.default_rng(children[i + 1])
        parts.append(rng.normal(centers[i], sigma, (m, spec.d)).astype(np.float32))
        labels[at : at + m] = i
        at += m
    return PointSet(np.vstack(parts)), labels
