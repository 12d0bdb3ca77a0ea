"""Initial seeding from similar buckets.

Buckets are hashed into bins by MinHash over their member-id sets; ids
appearing in a strict majority of a bin's buckets form a seed group; groups
meeting the size threshold are kept and near-duplicates are removed by
re-running the binning over the groups themselves.  No operation takes a
cluster count: how many groups come out is a result, not a target.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import (
    Bin,
    Bucket,
    CategoricalData,
    DenseData,
    InvalidInput,
    SeedGroup,
    SparseData,
    CentralVector,
)
from .hashing import SignatureScheme, derive_seed
from .numeric import exact_centroid

__all__ = [
    "SeedingParams",
    "bin_buckets",
    "majority_vote",
    "find_seed_groups",
    "dedup_groups",
    "seeds_to_centers",
]

_DEDUP_TAG = 0xDED_0


@dataclass(frozen=True)
class SeedingParams:
    """K hashes per signature, L tables, and the minimum group size.

    `dedup_tables` is the table count for the deduplication pass (the main
    pass's K is reused there).  `table_seeds` / `dedup_seeds` pin every hash
    function explicitly; workers of the distributed engine must share them.
    """

    num_hashes: int  # K
    num_tables: int  # L
    min_group_size: int = 1  # delta
    seed: int = 0
    dedup_tables: int = 1
    table_seeds: tuple = None
    dedup_seeds: tuple = None

    def __post_init__(self):
        if self.num_hashes < 1 or self.num_tables < 1 or self.dedup_tables < 1:
            raise InvalidInput("need K >= 1, L >= 1, dedup_tables >= 1")
        if self.min_group_size < 1:
            raise InvalidInput("minimum group size must be >= 1")

    def scheme(self, universe: int) -> SignatureScheme:
        return SignatureScheme(
            self.num_hashes,
            self.num_tables,
            universe,
            seed=self.seed,
            table_seeds=self.table_seeds,
        )

    def dedup_scheme(self, universe: int) -> SignatureScheme:
        return SignatureScheme(
            self.num_hashes,
            self.dedup_tables,
            universe,
            seed=derive_seed(self.seed, _DEDUP_TAG),
            table_seeds=self.dedup_seeds,
        )


def _group_by_signature(scheme: SignatureScheme, table: int, sets) -> list:
    """Indices of `sets` grouped by equal signature, smallest index first;
    groups ordered by signature for determinism."""
    sig = scheme.signatures_for_sets(table, sets)
    _, inverse = np.unique(sig, axis=0, return_inverse=True)
    order = np.argsort(inverse, kind="stable")
    groups = np.split(order, np.cumsum(np.bincount(inverse))[:-1])
    return [(tuple(sig[g[0]].tolist()), g) for g in groups]


def bin_buckets(buckets, params: SeedingParams, table: int, universe: int) -> list:
    """Group buckets whose member sets share a K-signature; bins holding a
    single bucket are dropped (an isolated bucket seeds nothing)."""
    if not buckets:
        return []
    scheme = params.scheme(universe)
    members = [b.members for b in buckets]
    return [
        Bin(signature=sig, bucket_indices=tuple(int(i) for i in g))
        for sig, g in _group_by_signature(scheme, table, members)
        if g.size > 1
    ]


def majority_vote(bin_: Bin, buckets) -> SeedGroup | None:
    """Ids present in strictly more than half of the bin's buckets."""
    parts = [buckets[i].members for i in bin_.bucket_indices]
    ids, counts = np.unique(np.concatenate(parts), return_counts=True)
    winners = ids[2 * counts > len(parts)]
    if winners.size == 0:
        return None
    return SeedGroup(winners)


def dedup_groups(groups, params: SeedingParams, universe: int) -> list:
    """Drop near-duplicate groups: bin the groups themselves; within each
    bin keep one representative (the largest, ties to the lexicographically
    smallest member sequence).  Output in canonical order."""
    survivors = [g if isinstance(g, SeedGroup) else SeedGroup(g) for g in groups]
    if len(survivors) > 1:
        scheme = params.dedup_scheme(universe)
        for table in range(params.dedup_tables):
            members = [g.members for g in survivors]
            kept = []
            for _, idx in _group_by_signature(scheme, table, members):
                if idx.size == 1:
                    kept.append(survivors[idx[0]])
                else:
                    candidates = [survivors[i] for i in idx]
                    kept.append(min(candidates, key=lambda g: (-len(g), g.key())))
            survivors = kept
    return sorted(survivors, key=lambda g: g.key())


def find_seed_groups(buckets, params: SeedingParams, universe: int, trace=None) -> list:
    """Full seeding pass: per table bin + vote + size filter, then dedup.

    `universe` must be the dataset size n (ids hash over [0, n)); in the
    distributed engine every worker passes the same value so bucket
    signatures agree across workers.  `trace`, if given, receives
    (table, bucket_ids, group) triples for every surviving vote so the
    majority property can be re-checked externally.

    An empty result is valid; callers decide the fallback.
    """
    if not buckets:
        raise InvalidInput("seeding needs at least one bucket")
    raw = collect_votes(buckets, params, universe, trace)
    return dedup_groups(raw, params, universe)


def collect_votes(buckets, params: SeedingParams, universe: int, trace=None) -> list:
    """The pre-dedup accumulation: every surviving vote from every table."""
    groups = []
    for table in range(params.num_tables):
        for bin_ in bin_buckets(buckets, params, table, universe):
            group = majority_vote(bin_, buckets)
            if group is not None and len(group) >= params.min_group_size:
                groups.append(group)
                if trace is not None:
                    ids = tuple(buckets[i].bucket_id for i in bin_.bucket_indices)
                    trace.append((table, ids, group))
    return groups


def seeds_to_centers(groups, data) -> list:
    """Central vector of each group: coordinate mean for dense data, per
    attribute mode for categorical data (ties to the smallest code), and
    majority membership per dimension for sparse sets."""
    centers = []
    if isinstance(data, DenseData):
        # exact mean: bit-identical however the members are partitioned,
        # which the distributed engine's cross-worker reduction relies on
        for g in groups:
            centers.append(
                CentralVector("centroid", exact_centroid(data.vectors[g.members]), len(g))
            )
    elif isinstance(data, CategoricalData):
        for g in groups:
            sub = data.codes[g.members]
            mode = np.empty(data.dim, dtype=np.int32)
            for col in range(data.dim):
                mode[col] = np.argmax(np.bincount(sub[:, col], minlength=data.code_space))
            centers.append(CentralVector("mode", mode, len(g)))
    elif isinstance(data, SparseData):
        for g in groups:
            counts = np.zeros(data.universe, dtype=np.int64)
            for i in g.members:
                counts[data.sets[int(i)]] += 1
            # strict majority membership; a tie keeps the dimension absent
            mode = (2 * counts > len(g)).astype(np.int32)
            centers.append(CentralVector("mode", mode, len(g)))
    else:
        raise InvalidInput("unsupported dataset type for center computation")
    return centers
