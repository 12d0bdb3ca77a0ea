"""Deterministic synthetic datasets with ground truth for benchmarks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import CategoricalData, DenseData, InvalidInput, SparseData

__all__ = ["SyntheticSpec", "gen_synthetic"]

KINDS = ("gaussian-mixture", "categorical-patterns", "sparse-overlap")


@dataclass(frozen=True)
class SyntheticSpec:
    kind: str
    n: int
    dim: int
    clusters: int
    separation: float = 10.0  # mean spacing in noise units
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInput(f"unknown synthetic kind {self.kind!r}")
        if self.n < self.clusters or self.clusters < 1:
            raise InvalidInput("need n >= clusters >= 1")


@dataclass(frozen=True)
class SyntheticResult:
    data: object
    labels: np.ndarray
    true_radii: np.ndarray


def gen_synthetic(spec: SyntheticSpec) -> SyntheticResult:
    rng = np.random.default_rng(spec.seed)
    labels = np.sort(rng.integers(0, spec.clusters, spec.n))
    # guarantee every cluster is populated
    labels[: spec.clusters] = np.arange(spec.clusters)
    labels = np.sort(labels)

    if spec.kind == "gaussian-mixture":
        means = _spread_means(spec.clusters, spec.dim, spec.separation, rng)
        points = means[labels] + rng.standard_normal((spec.n, spec.dim))
        data = DenseData(points)
        radii = _dense_radii(points, labels, means, spec.clusters)
        return SyntheticResult(data, labels, radii)

    if spec.kind == "categorical-patterns":
        # one distinct code pattern per cluster; a small flip probability
        # perturbs attributes to random codes
        code_space = max(spec.clusters * 2, 8)
        patterns = rng.integers(0, code_space, (spec.clusters, spec.dim))
        codes = patterns[labels].copy()
        flips = rng.random((spec.n, spec.dim)) < (1.0 / max(spec.separation, 1.1))
        codes[flips] = rng.integers(0, code_space, int(flips.sum()))
        data = CategoricalData(codes.astype(np.int32), code_space)
        radii = _mode_radii(codes, labels, patterns, spec.clusters)
        return SyntheticResult(data, labels, radii)

    # sparse-overlap: per cluster a base index set; members keep a high
    # fraction of it and add a few random extras
    universe = max(spec.dim, 16)
    base_size = max(universe // (spec.clusters * 4), 8)
    keep = 0.95
    bases = [
        np.sort(rng.choice(universe, base_size, replace=False))
        for _ in range(spec.clusters)
    ]
    sets = []
    for lab in labels:
        base = bases[lab]
        mask = rng.random(base.size) < keep
        kept = base[mask] if mask.any() else base[:1]
        extras = rng.choice(universe, max(1, int(base_size * 0.05)), replace=False)
        sets.append(np.union1d(kept, extras))
    data = SparseData(sets, universe)
    radii = _jaccard_radii(sets, labels, bases, spec.clusters)
    return SyntheticResult(data, labels, radii)


def _spread_means(k, dim, separation, rng) -> np.ndarray:
    """Cluster means on a jittered planar spiral embedded in dim dimensions,
    rescaled so the minimum pairwise distance equals `separation` (in noise
    units).  Concentrating the means near a low-dimensional sheet mirrors
    real feature corpora and keeps random 1-d projections informative, which
    isotropically drawn means in high dimension do not.
    """
    if k == 1:
        return np.zeros((1, dim))
    idx = np.arange(k)
    radius = np.sqrt(idx + 0.5)
    angle = idx * (np.pi * (3.0 - np.sqrt(5.0)))
    plane = np.stack([radius * np.cos(angle), radius * np.sin(angle)], axis=1)
    plane += 0.05 * rng.standard_normal(plane.shape)
    basis = np.linalg.qr(rng.standard_normal((dim, min(2, dim))))[0]
    means = plane[:, : basis.shape[1]] @ basis.T
    dists = np.sqrt(((means[:, None, :] - means[None, :, :]) ** 2).sum(-1))
    np.fill_diagonal(dists, np.inf)
    return means * (separation / dists.min())


def _dense_radii(points, labels, means, k):
    radii = np.zeros(k)
    for j in range(k):
        members = points[labels == j]
        radii[j] = np.sqrt(((members - means[j]) ** 2).sum(-1)).max()
    return radii


def _mode_radii(codes, labels, patterns, k):
    radii = np.zeros(k)
    d = codes.shape[1]
    for j in range(k):
        sub = codes[labels == j]
        match = (sub == patterns[j]).sum(-1)
        radii[j] = (1.0 - match / (2 * d - match)).max()
    return radii


def _jaccard_radii(sets, labels, bases, k):
    radii = np.zeros(k)
    for i, lab in enumerate(labels):
        inter = np.intersect1d(sets[i], bases[lab], assume_unique=True).size
        union = sets[i].size + bases[lab].size - inter
        radii[lab] = max(radii[lab], 1.0 - inter / union)
    return radii
