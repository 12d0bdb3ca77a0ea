"""Comparison clustering methods sharing the toolkit's data, metric, and
seeding interfaces: random seeding, distance-weighted seeding, Lloyd
iterations, and the mode-update analogue for categorical/sparse data."""

from __future__ import annotations

import numpy as np

from .assignment import assign, distance_matrix, CHUNK
from .data import (
    CategoricalData,
    CentralVector,
    Clustering,
    DenseData,
    InvalidInput,
    SeedGroup,
    SparseData,
)
from .seeding import seeds_to_centers

__all__ = ["seed_random", "seed_kmeanspp", "lloyd", "kmodes"]


def _object_center(data, i: int) -> CentralVector:
    if isinstance(data, DenseData):
        return CentralVector("centroid", data.vectors[i], 1)
    if isinstance(data, CategoricalData):
        return CentralVector("mode", data.codes[i], 1)
    vec = np.zeros(data.universe, dtype=np.int32)
    vec[data.sets[int(i)]] = 1
    return CentralVector("mode", vec, 1)


def seed_random(data, k: int, seed: int) -> list:
    """k distinct uniformly sampled objects as centers."""
    if k > data.n:
        raise InvalidInput(f"cannot draw {k} distinct centers from {data.n} objects")
    rng = np.random.default_rng(seed)
    picks = rng.choice(data.n, size=k, replace=False)
    return [_object_center(data, int(i)) for i in picks]


def _min_dists(data, centers, metric) -> np.ndarray:
    n = data.n
    out = np.empty(n, dtype=np.float64)
    for lo in range(0, n, CHUNK):
        rows = np.arange(lo, min(lo + CHUNK, n))
        out[rows] = distance_matrix(data, centers, metric, rows).min(axis=1)
    return out


def seed_kmeanspp(data, k: int, seed: int, metric: str = "euclidean") -> list:
    """Distance-weighted incremental seeding.

    The first center is uniform; each next object is drawn with probability
    proportional to its squared distance (Euclidean) or plain distance
    (Jaccard, where squaring has no geometric motivation) to the nearest
    chosen center.  If remaining distances vanish, falls back to a uniform
    draw over unchosen objects so k distinct centers always come back.
    """
    if k > data.n:
        raise InvalidInput(f"cannot draw {k} distinct centers from {data.n} objects")
    rng = np.random.default_rng(seed)
    chosen = [int(rng.integers(data.n))]
    best = None
    while len(chosen) < k:
        newest = [_object_center(data, chosen[-1])]
        d_new = _min_dists(data, newest, metric)
        best = d_new if best is None else np.minimum(best, d_new)
        weights = best**2 if metric == "euclidean" else best.copy()
        weights[chosen] = 0.0
        total = weights.sum()
        if total <= 0.0:
            remaining = np.setdiff1d(np.arange(data.n), np.array(chosen))
            chosen.append(int(rng.choice(remaining)))
        else:
            chosen.append(int(rng.choice(data.n, p=weights / total)))
    return [_object_center(data, i) for i in chosen]


def lloyd(
    data: DenseData,
    k: int,
    seed: int,
    max_iters: int = 100,
    tol: float = 1e-6,
) -> Clustering:
    """Random init, then assign/update until centroids move less than `tol`
    or `max_iters` is hit.  The objective is non-increasing across rounds."""
    centers = seed_random(data, k, seed)
    clustering = assign(data, centers, "euclidean")
    for _ in range(max_iters):
        groups = [
            SeedGroup(np.flatnonzero(clustering.assignment == j))
            for j in range(len(clustering.centers))
            if (clustering.assignment == j).any()
        ]
        new_centers = seeds_to_centers(groups, data)
        moved = _center_shift(clustering.centers, new_centers, clustering.assignment)
        clustering = assign(data, new_centers, "euclidean")
        if moved < tol:
            break
    return clustering


def _center_shift(old, new, assignment) -> float:
    # compare only surviving centers; empties were dropped from `new`
    survivors = [c for j, c in enumerate(old) if (assignment == j).any()]
    return max(
        (float(np.linalg.norm(a.values - b.values)) for a, b in zip(survivors, new)),
        default=0.0,
    )


def kmodes(data, k: int, seed: int, max_iters: int = 100) -> Clustering:
    """Random init; assign by token-set Jaccard distance, update by
    per-attribute mode; stops when the assignment is unchanged."""
    if not isinstance(data, (CategoricalData, SparseData)):
        raise InvalidInput("mode-update clustering needs categorical or sparse data")
    centers = seed_random(data, k, seed)
    clustering = assign(data, centers, "jaccard")
    for _ in range(max_iters):
        groups = [
            SeedGroup(np.flatnonzero(clustering.assignment == j))
            for j in range(len(clustering.centers))
            if (clustering.assignment == j).any()
        ]
        new_centers = seeds_to_centers(groups, data)
        new_clustering = assign(data, new_centers, "jaccard")
        if len(new_clustering.centers) == len(clustering.centers) and (
            new_clustering.assignment == clustering.assignment
        ).all():
            clustering = new_clustering
            break
        clustering = new_clustering
    return clustering
