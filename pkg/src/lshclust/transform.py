"""Conversion of each data type into the unified bucket collection.

Dense vectors are projected and each hash table evenly partitioned; mixed
records are discretized then signature-bucketed; sparse sets are reduced to
moderate dimensionality first and then signature-bucketed the same way.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import (
    Bucket,
    CategoricalData,
    DenseData,
    InvalidInput,
    MixedData,
    SparseData,
    tokenize_categorical,
)
from .hashing import DophReducer, ProjectionFunction, SignatureScheme, derive_seed

__all__ = [
    "HomoTransformParams",
    "MinhashTransformParams",
    "transform_homo",
    "discretize_numeric",
    "transform_hetero",
    "transform_sparse",
]


@dataclass(frozen=True)
class HomoTransformParams:
    """Projection bucketing: `num_tables` tables, each split into
    `buckets_per_table` even buckets.  Explicit `directions` (num_tables x d)
    replay a fixed set of projections deterministically."""

    num_tables: int  # m
    buckets_per_table: int  # t
    seed: int = 0
    directions: np.ndarray = None

    def __post_init__(self):
        if self.num_tables < 1:
            raise InvalidInput("need at least one table")
        if self.buckets_per_table < 2:
            raise InvalidInput("need at least two buckets per table")
        if self.directions is not None:
            d = np.asarray(self.directions, dtype=np.float64)
            if d.ndim != 2 or d.shape[0] != self.num_tables:
                raise InvalidInput("directions must be (num_tables, dim)")
            object.__setattr__(self, "directions", d)

    def projection(self, table: int, dim: int) -> ProjectionFunction:
        if self.directions is not None:
            return ProjectionFunction(self.directions[table])
        return ProjectionFunction.from_seed(self.seed, table, dim)


@dataclass(frozen=True)
class MinhashTransformParams:
    """Signature bucketing with K hashes per signature over L tables.

    `bins_per_attribute` controls numeric discretization for mixed data;
    `target_dims` is the reduced dimensionality for sparse data.  Explicit
    `table_seeds` pin every hash function.
    """

    num_hashes: int  # K
    num_tables: int  # L
    seed: int = 0
    bins_per_attribute: int = 1024
    target_dims: int = 400
    table_seeds: tuple = None

    def __post_init__(self):
        if self.num_hashes < 1 or self.num_tables < 1:
            raise InvalidInput("need K >= 1 and L >= 1")
        if self.bins_per_attribute < 2:
            raise InvalidInput("need at least two discretization bins")

    def scheme(self, universe: int) -> SignatureScheme:
        return SignatureScheme(
            self.num_hashes,
            self.num_tables,
            universe,
            seed=self.seed,
            table_seeds=self.table_seeds,
        )


def even_partition_sizes(n: int, parts: int) -> np.ndarray:
    """Sizes of an even split: the first n % parts parts get one extra."""
    q, r = divmod(n, parts)
    sizes = np.full(parts, q, dtype=np.int64)
    sizes[:r] += 1
    return sizes


def _rank_split(values: np.ndarray, parts: int) -> list:
    """Split ids into `parts` contiguous rank groups of values, ascending,
    ties broken by id so the partition is total and reproducible."""
    n = values.shape[0]
    order = np.lexsort((np.arange(n), values))
    bounds = np.cumsum(even_partition_sizes(n, parts))[:-1]
    return np.split(order, bounds)


def transform_homo(data: DenseData, params: HomoTransformParams) -> list:
    """Project each table, sort, and evenly partition ids into buckets.

    Returns exactly num_tables * buckets_per_table buckets; per table the
    bucket sizes differ by at most one and every id appears exactly once.
    """
    n = data.n
    t = params.buckets_per_table
    if t > n:
        raise InvalidInput(f"cannot split {n} objects into {t} buckets")
    buckets = []
    for table in range(params.num_tables):
        proj = params.projection(table, data.dim)
        values = data.vectors @ proj.direction
        for slot, ids in enumerate(_rank_split(values, t)):
            buckets.append(Bucket(table, slot, np.sort(ids)))
    return buckets


def discretize_numeric(data, bins_per_attribute: int) -> CategoricalData:
    """Replace each numeric attribute by its equal-frequency bin index.

    The binning is the one-dimensional specialization of the projection
    split: sort by (value, id), cut into even parts.  Categorical attributes
    pass through unchanged.
    """
    if isinstance(data, DenseData):
        numeric = data.vectors
        categorical = np.empty((data.n, 0), dtype=np.int32)
    elif isinstance(data, MixedData):
        numeric, categorical = data.numeric, data.categorical
    else:
        raise InvalidInput("discretization expects dense or mixed data")
    if numeric.shape[1] == 0:
        raise InvalidInput("no numeric attribute to discretize")
    n = numeric.shape[0]
    if bins_per_attribute > n:
        raise InvalidInput("more discretization bins than objects")
    binned = np.empty(numeric.shape, dtype=np.int32)
    for col in range(numeric.shape[1]):
        for code, ids in enumerate(_rank_split(numeric[:, col], bins_per_attribute)):
            binned[ids, col] = code
    codes = np.concatenate([binned, categorical], axis=1)
    return CategoricalData(codes)


def _signature_buckets(scheme: SignatureScheme, sets) -> list:
    """Group set indices by per-table signature; emit non-empty buckets with
    deterministic slot numbering (signatures in sorted order)."""
    buckets = []
    for table in range(scheme.num_tables):
        sig = scheme.signatures_for_sets(table, sets)
        _, inverse = np.unique(sig, axis=0, return_inverse=True)
        order = np.argsort(inverse, kind="stable")
        groups = np.split(order, np.cumsum(np.bincount(inverse))[:-1])
        for slot, ids in enumerate(groups):
            buckets.append(Bucket(table, slot, np.sort(ids)))
    return buckets


def transform_hetero(data, params: MinhashTransformParams):
    """Bucket mixed/categorical records by (K, L) signatures of their
    attribute-token sets.  Returns (buckets, unified categorical data); the
    unified form is what assignment represents objects with."""
    if isinstance(data, (DenseData, MixedData)):
        cat = discretize_numeric(data, params.bins_per_attribute)
    elif isinstance(data, CategoricalData):
        cat = data
    else:
        raise InvalidInput("heterogeneous transform expects mixed or categorical data")
    tokens = tokenize_categorical(cat)
    scheme = params.scheme(universe=cat.dim * cat.code_space)
    return _signature_buckets(scheme, tokens), cat


def transform_sparse(data: SparseData, params: MinhashTransformParams):
    """Reduce sparse sets to `target_dims` dimensions, then bucket the
    reduced sets by (K, L) signatures.  Returns (buckets, reduced data);
    assignment operates on the reduced representation."""
    if params.target_dims > data.universe:
        reduced = data  # already at or below the target dimensionality
    else:
        reducer = DophReducer(
            derive_seed(params.seed, 0xD0), data.universe, params.target_dims
        )
        reduced = SparseData(reducer.reduce_dataset(data.sets), params.target_dims)
    scheme = params.scheme(universe=reduced.universe)
    return _signature_buckets(scheme, reduced.sets), reduced
