"""Core domain types: datasets, buckets, seed groups, central vectors, distances.

All containers are immutable after construction and safe to share across
threads; distance functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DenseData",
    "CategoricalData",
    "SparseData",
    "MixedData",
    "Bucket",
    "Bin",
    "SeedGroup",
    "CentralVector",
    "Clustering",
    "dist_euclidean",
    "dist_jaccard",
    "jaccard_of_arrays",
    "categorical_tokens",
    "record_jaccard_distance",
]


class InvalidInput(ValueError):
    """Raised when an operation's preconditions are violated."""


def _as_sorted_unique(a) -> np.ndarray:
    arr = np.asarray(a, dtype=np.int64)
    if arr.ndim != 1:
        raise InvalidInput("index sets must be one-dimensional")
    return np.unique(arr)


@dataclass(frozen=True)
class DenseData:
    """n real vectors of equal dimension; object id = row index."""

    vectors: np.ndarray  # (n, d) float64

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.vectors, dtype=np.float64))
        if v.ndim != 2:
            raise InvalidInput("dense data must be a 2-d array")
        object.__setattr__(self, "vectors", v)

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class CategoricalData:
    """n records of d attributes, each a small non-negative integer code."""

    codes: np.ndarray  # (n, d) int32
    code_space: int = 0  # exclusive upper bound on any code; inferred if 0

    def __post_init__(self):
        c = np.ascontiguousarray(np.asarray(self.codes, dtype=np.int32))
        if c.ndim != 2:
            raise InvalidInput("categorical data must be a 2-d array")
        if c.size and c.min() < 0:
            raise InvalidInput("attribute codes must be non-negative")
        space = self.code_space
        if space <= 0:
            space = int(c.max()) + 1 if c.size else 1
        elif c.size and int(c.max()) >= space:
            raise InvalidInput("code_space smaller than largest code")
        object.__setattr__(self, "codes", c)
        object.__setattr__(self, "code_space", space)

    @property
    def n(self) -> int:
        return self.codes.shape[0]

    @property
    def dim(self) -> int:
        return self.codes.shape[1]


@dataclass(frozen=True)
class SparseData:
    """n sets of feature indices over a universe [0, universe)."""

    sets: list  # list of sorted unique int64 arrays
    universe: int = 0  # inferred as max index + 1 if 0

    def __post_init__(self):
        cleaned = []
        top = -1
        for s in self.sets:
            arr = np.asarray(s, dtype=np.int64)
            if arr.ndim != 1 or arr.size == 0:
                raise InvalidInput("sparse sets must be non-empty 1-d index arrays")
            if arr.min() < 0:
                raise InvalidInput("sparse indices must be non-negative")
            if arr.size > 1 and not (np.diff(arr) > 0).all():
                arr = np.unique(arr)
            top = max(top, int(arr[-1]))
            cleaned.append(arr)
        uni = self.universe
        if uni <= 0:
            uni = top + 1 if top >= 0 else 1
        elif top >= uni:
            raise InvalidInput("sparse index outside declared universe")
        object.__setattr__(self, "sets", cleaned)
        object.__setattr__(self, "universe", uni)

    @property
    def n(self) -> int:
        return len(self.sets)

    @property
    def dim(self) -> int:
        return self.universe


@dataclass(frozen=True)
class MixedData:
    """Records with both numeric and categorical attributes.

    Column order is immaterial to every downstream operation (tokens and
    distances are invariant under attribute permutation), so the two groups
    are stored side by side.
    """

    numeric: np.ndarray  # (n, d_num) float64
    categorical: np.ndarray  # (n, d_cat) int32

    def __post_init__(self):
        num = np.ascontiguousarray(np.asarray(self.numeric, dtype=np.float64))
        cat = np.ascontiguousarray(np.asarray(self.categorical, dtype=np.int32))
        if num.ndim != 2 or cat.ndim != 2:
            raise InvalidInput("mixed data components must be 2-d arrays")
        if num.shape[0] != cat.shape[0]:
            raise InvalidInput("numeric and categorical row counts differ")
        object.__setattr__(self, "numeric", num)
        object.__setattr__(self, "categorical", cat)

    @property
    def n(self) -> int:
        return self.numeric.shape[0]

    @property
    def dim(self) -> int:
        return self.numeric.shape[1] + self.categorical.shape[1]


@dataclass(frozen=True)
class Bucket:
    """A set of data ids grouped by one hash table; id = (table, slot)."""

    table: int
    slot: int
    members: np.ndarray  # sorted unique int64

    def __post_init__(self):
        m = _as_sorted_unique(self.members)
        if m.size == 0:
            raise InvalidInput("buckets must be non-empty")
        object.__setattr__(self, "members", m)

    @property
    def bucket_id(self) -> tuple:
        return (self.table, self.slot)


@dataclass(frozen=True)
class Bin:
    """Bucket indices whose member sets share one hash signature."""

    signature: tuple
    bucket_indices: tuple  # positions into the originating bucket list


@dataclass(frozen=True)
class SeedGroup:
    """Data ids voted out of one bin of similar buckets."""

    members: np.ndarray  # sorted unique int64

    def __post_init__(self):
        m = _as_sorted_unique(self.members)
        if m.size == 0:
            raise InvalidInput("seed groups must be non-empty")
        object.__setattr__(self, "members", m)

    def key(self) -> tuple:
        """Canonical hashable form, used for ordering and dedup."""
        return tuple(self.members.tolist())

    def __len__(self) -> int:
        return int(self.members.size)


@dataclass(frozen=True)
class CentralVector:
    """Cluster representative: a coordinate mean or a per-attribute mode."""

    kind: str  # "centroid" | "mode"
    values: np.ndarray
    weight: int = 1

    def __post_init__(self):
        if self.kind not in ("centroid", "mode"):
            raise InvalidInput(f"unknown central vector kind {self.kind!r}")
        dtype = np.float64 if self.kind == "centroid" else np.int32
        object.__setattr__(self, "values", np.asarray(self.values, dtype=dtype))
        if self.weight < 1:
            raise InvalidInput("central vector weight must be >= 1")


@dataclass(frozen=True)
class Clustering:
    """Assignment of every object to its nearest center, with radii."""

    centers: list  # list[CentralVector]
    assignment: np.ndarray  # (n,) int64 index into centers
    radii: np.ndarray  # (k,) float64, max member distance, 0 if empty
    objective: float  # sum of per-object distances to assigned center
    sizes: np.ndarray = field(default=None)  # (k,) int64 members per center

    def __post_init__(self):
        a = np.asarray(self.assignment, dtype=np.int64)
        r = np.asarray(self.radii, dtype=np.float64)
        k = len(self.centers)
        if a.size and (a.min() < 0 or a.max() >= k):
            raise InvalidInput("assignment index out of range")
        if r.shape != (k,):
            raise InvalidInput("radii length must match center count")
        sizes = self.sizes
        if sizes is None:
            sizes = np.bincount(a, minlength=k).astype(np.int64)
        object.__setattr__(self, "assignment", a)
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "sizes", np.asarray(sizes, dtype=np.int64))

    @property
    def k_star(self) -> int:
        """Number of non-empty clusters actually produced."""
        return int((self.sizes > 0).sum())

    @property
    def empty_clusters(self) -> np.ndarray:
        return np.flatnonzero(self.sizes == 0)


# ---------------------------------------------------------------------------
# distances


def dist_euclidean(x, y) -> float:
    """Euclidean distance between two equal-length real vectors."""
    xv = np.asarray(x, dtype=np.float64)
    yv = np.asarray(y, dtype=np.float64)
    if xv.shape != yv.shape:
        raise InvalidInput(f"dimension mismatch: {xv.shape} vs {yv.shape}")
    return float(np.sqrt(np.sum((xv - yv) ** 2)))


def jaccard_of_arrays(a: np.ndarray, b: np.ndarray) -> float:
    """Jaccard similarity of two sorted unique index arrays."""
    inter = np.intersect1d(a, b, assume_unique=True).size
    union = a.size + b.size - inter
    if union == 0:
        return 1.0  # two empty sets are indistinguishable
    return inter / union


def dist_jaccard(a, b) -> float:
    """1 - |A∩B|/|A∪B| over any two iterables of tokens; empty,empty -> 0."""
    sa, sb = set(a), set(b)
    union = len(sa | sb)
    if union == 0:
        return 0.0
    return 1.0 - len(sa & sb) / union


def categorical_tokens(record, code_space: int = 0) -> np.ndarray:
    """Encode a record as a sorted set of (attribute, value) tokens.

    Token = attribute_index * code_space + value_code, which is bijective
    with the (index, value) pair, so Jaccard over token sets equals Jaccard
    over the pair sets.  `code_space` defaults to max(code)+1 of the record;
    callers comparing records must pass a shared dataset-wide value.
    """
    r = np.asarray(record, dtype=np.int64)
    if code_space <= 0:
        code_space = int(r.max()) + 1 if r.size else 1
    tokens = np.arange(r.size, dtype=np.int64) * code_space + r
    return tokens  # strictly increasing by construction


def tokenize_categorical(data: CategoricalData) -> list:
    """Token arrays for every record of a categorical dataset."""
    space = data.code_space
    base = np.arange(data.dim, dtype=np.int64) * space
    return [base + row for row in data.codes.astype(np.int64)]


def record_jaccard_distance(a, b, code_space: int) -> float:
    """1-Jaccard between two categorical records via their token sets.

    With one token per attribute, |∩| = #matching attributes and
    |∪| = 2d - |∩|.
    """
    ra = np.asarray(a)
    rb = np.asarray(b)
    if ra.shape != rb.shape:
        raise InvalidInput("records must have equal attribute counts")
    match = int((ra == rb).sum())
    d = ra.size
    if d == 0:
        return 0.0
    return 1.0 - match / (2 * d - match)
