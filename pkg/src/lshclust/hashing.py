"""LSH primitives: MinHash, random projections, signatures, and a
one-permutation dimensionality reducer for sparse index sets.

Every object here is a pure function of (seed, input): immutable after
construction and safe to evaluate concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .data import InvalidInput

_M64 = (1 << 64) - 1
_MERSENNE61 = (1 << 61) - 1

# Universes up to this size materialize their permutation as a rank table:
# the memory cost is trivial there, repeated evaluation is faster, and the
# seed family covers all orderings (the masked mixing below covers far fewer
# when only a few bits are in play).  Larger universes use O(1)-memory
# cycle-walking.
_TABLE_THRESHOLD = 4096


def splitmix64(z: int) -> int:
    """Scalar 64-bit mixer; used to derive independent sub-seeds."""
    z = (z + 0x9E3779B97F4A7C15) & _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return (z ^ (z >> 31)) & _M64


def derive_seed(master: int, *path: int) -> int:
    """Deterministic seed for a nested component (table index, hash index...)."""
    z = splitmix64(master & _M64)
    for p in path:
        z = splitmix64(z ^ splitmix64((p + 0x632BE59BD9B4E019) & _M64))
    return z


def as_index_array(s) -> np.ndarray:
    """Accept any iterable of integers (including sets) as an int64 array."""
    if isinstance(s, (set, frozenset)):
        s = sorted(s)
    return np.asarray(s, dtype=np.int64)


@dataclass(frozen=True)
class MinHashFunction:
    """Seeded pseudo-permutation over [0, universe); h(S) = min π(S).

    π is an invertible integer mixing over [0, 2^w), w = ceil(log2 universe),
    restricted to [0, universe) by cycle-walking, so it is a true bijection
    without materializing a permutation array.  An explicit `table` overrides
    the mixing (used for tiny universes and deterministic fixtures).
    """

    seed: int
    universe_size: int
    table: np.ndarray | None = None  # optional explicit permutation

    def __post_init__(self):
        if self.universe_size < 1:
            raise InvalidInput("universe must be positive")
        if self.table is None and self.universe_size <= _TABLE_THRESHOLD:
            object.__setattr__(self, "table", self._rank_table())
        elif self.table is not None:
            t = np.asarray(self.table, dtype=np.uint64)
            if t.shape != (self.universe_size,):
                raise InvalidInput("permutation table has wrong length")
            object.__setattr__(self, "table", t)

    @classmethod
    def identity(cls, universe_size: int) -> "MinHashFunction":
        return cls(0, universe_size, table=np.arange(universe_size, dtype=np.uint64))

    def _rank_table(self) -> np.ndarray:
        """π as the rank of each element's 64-bit mixed value."""
        u = self.universe_size
        a1 = np.uint64(derive_seed(self.seed, 3))
        c1 = np.uint64(derive_seed(self.seed, 1) | 1)
        c2 = np.uint64(derive_seed(self.seed, 2) | 1)
        x = np.arange(u, dtype=np.uint64)
        x = (x + a1)
        x ^= x >> np.uint64(30)
        x *= c1
        x ^= x >> np.uint64(27)
        x *= c2
        x ^= x >> np.uint64(31)
        table = np.empty(u, dtype=np.uint64)
        table[np.argsort(x, kind="stable")] = np.arange(u, dtype=np.uint64)
        return table

    @cached_property
    def _params(self):
        w = max(1, int(self.universe_size - 1).bit_length())
        mask = (1 << w) - 1
        c1 = derive_seed(self.seed, 1) | 1
        c2 = derive_seed(self.seed, 2) | 1
        a1 = derive_seed(self.seed, 3)
        s1 = max(1, w // 2)
        s2 = max(1, w // 3)
        return (
            np.uint64(mask),
            np.uint64(c1 & mask),
            np.uint64(c2 & mask),
            np.uint64(a1 & mask),
            np.uint64(s1),
            np.uint64(s2),
        )

    def _mix(self, x: np.ndarray) -> np.ndarray:
        """One bijective round on [0, 2^w): xor-shift and odd multiply."""
        mask, c1, c2, a1, s1, s2 = self._params
        x = (x + a1) & mask
        x ^= x >> s1
        x = (x * c1) & mask
        x ^= x >> s2
        x = (x * c2) & mask
        x ^= x >> s1
        return x

    def permute(self, elements) -> np.ndarray:
        """π applied elementwise; input values must lie in [0, universe)."""
        a = np.asarray(elements, dtype=np.int64)
        if a.size and (a.min() < 0 or a.max() >= self.universe_size):
            raise InvalidInput("element outside hash universe")
        if self.table is not None:
            return self.table[a]
        x = self._mix(a.astype(np.uint64))
        bound = np.uint64(self.universe_size)
        out = np.array(x, copy=True)
        walking = out >= bound
        while walking.any():
            out[walking] = self._mix(out[walking])
            walking = out >= bound
        return out

    def __call__(self, s) -> int:
        """MinHash value of a non-empty set of integers."""
        arr = as_index_array(s)
        if arr.size == 0:
            raise InvalidInput("minhash of an empty set is undefined")
        return int(self.permute(arr).min())


def minhash_collision_matrix(seeds: np.ndarray, universe: int, a, b) -> np.ndarray:
    """Vectorized h(A) == h(B) over many independently seeded functions.

    Evaluates the same mixing as MinHashFunction but with the seed axis
    broadcast, to make Monte-Carlo collision estimates cheap.  Only the
    cycle-walking regime is replicated, so the universe must exceed the
    rank-table threshold.
    """
    if universe <= _TABLE_THRESHOLD:
        raise InvalidInput("batched collisions require a cycle-walking universe")
    w = max(1, int(universe - 1).bit_length())
    mask = np.uint64((1 << w) - 1)
    s1 = np.uint64(max(1, w // 2))
    s2 = np.uint64(max(1, w // 3))
    seeds = np.asarray(seeds, dtype=np.uint64)
    c1 = np.empty_like(seeds)
    c2 = np.empty_like(seeds)
    a1 = np.empty_like(seeds)
    for i, sd in enumerate(seeds.tolist()):
        c1[i] = np.uint64((derive_seed(sd, 1) | 1) & int(mask))
        c2[i] = np.uint64((derive_seed(sd, 2) | 1) & int(mask))
        a1[i] = np.uint64(derive_seed(sd, 3) & int(mask))
    c1, c2, a1 = c1[:, None], c2[:, None], a1[:, None]

    def mix(x):
        x = (x + a1) & mask
        x ^= x >> s1
        x = (x * c1) & mask
        x ^= x >> s2
        x = (x * c2) & mask
        x ^= x >> s1
        return x

    def perm_min(elems):
        x = mix(np.broadcast_to(np.asarray(elems, dtype=np.uint64), (seeds.size, len(elems))).copy())
        bound = np.uint64(universe)
        walking = x >= bound
        while walking.any():
            x[walking] = mix(x)[walking]
            walking = x >= bound
        return x.min(axis=1)

    return perm_min(a) == perm_min(b)


@dataclass(frozen=True)
class ProjectionFunction:
    """Inner product with a fixed direction; the LSH primitive for Euclidean
    distance.  Directions are standard-normal i.i.d. per coordinate."""

    direction: np.ndarray

    def __post_init__(self):
        d = np.ascontiguousarray(np.asarray(self.direction, dtype=np.float64))
        if d.ndim != 1:
            raise InvalidInput("direction must be a vector")
        object.__setattr__(self, "direction", d)

    @classmethod
    def from_seed(cls, seed: int, index: int, dim: int) -> "ProjectionFunction":
        rng = np.random.default_rng([seed & _M64, index])
        return cls(rng.standard_normal(dim))

    def __call__(self, x) -> float:
        xv = np.asarray(x, dtype=np.float64)
        if xv.shape != self.direction.shape:
            raise InvalidInput(
                f"dimension mismatch: {xv.shape} vs {self.direction.shape}"
            )
        return float(self.direction @ xv)


@dataclass(frozen=True)
class SignatureScheme:
    """(K, L) signature composition: per table, K concatenated MinHash values.

    Per-table seeds default to a deterministic derivation from `seed`; an
    explicit `table_seeds` (L rows of K integers) pins every function, which
    the distributed engine relies on to make workers agree and tests rely on
    for reproducible groupings.
    """

    num_hashes: int  # K
    num_tables: int  # L
    universe: int
    seed: int = 0
    table_seeds: tuple = None  # ((s00..s0K-1), ...) optional

    def __post_init__(self):
        if self.num_hashes < 1 or self.num_tables < 1:
            raise InvalidInput("need at least one hash and one table")
        if self.table_seeds is not None:
            ts = tuple(tuple(int(s) for s in row) for row in self.table_seeds)
            if len(ts) != self.num_tables or any(len(r) != self.num_hashes for r in ts):
                raise InvalidInput("table_seeds must be L rows of K seeds")
            object.__setattr__(self, "table_seeds", ts)

    def function_seeds(self, table: int) -> tuple:
        if not 0 <= table < self.num_tables:
            raise InvalidInput("table index out of range")
        if self.table_seeds is not None:
            return self.table_seeds[table]
        return tuple(
            derive_seed(self.seed, table, j) for j in range(self.num_hashes)
        )

    def functions(self, table: int) -> list:
        return [
            MinHashFunction(s, self.universe) for s in self.function_seeds(table)
        ]

    def signature(self, table: int, s) -> tuple:
        """Length-K tuple of MinHash values for one set."""
        return tuple(f(s) for f in self.functions(table))

    def signatures_for_sets(self, table: int, sets) -> np.ndarray:
        """(len(sets), K) signature matrix, one row per input set.

        Sets are concatenated and each hash function is applied once over the
        flat array with a segmented min, so cost is O(total_size * K).
        """
        sets = list(sets)
        if not sets:
            return np.empty((0, self.num_hashes), dtype=np.uint64)
        lengths = np.array([len(s) for s in sets])
        if (lengths == 0).any():
            raise InvalidInput("cannot sign an empty set")
        flat = np.concatenate([as_index_array(s) for s in sets])
        starts = np.concatenate(([0], np.cumsum(lengths)[:-1]))
        out = np.empty((len(sets), self.num_hashes), dtype=np.uint64)
        for j, f in enumerate(self.functions(table)):
            out[:, j] = np.minimum.reduceat(f.permute(flat), starts)
        return out


@dataclass(frozen=True)
class DophReducer:
    """One-permutation hashing of sparse sets down to [0, target_dims).

    The permuted universe is split into `target_dims` equal ranges.  Each
    occupied range contributes one token combining the range index with the
    range-relative minimum (mod a fixed prime); `sketch` additionally exposes
    the classical densified form where empty ranges borrow the value of the
    nearest occupied range to their right, wrapping circularly.
    """

    seed: int
    universe_size: int  # D
    target_dims: int  # r

    def __post_init__(self):
        if not 1 <= self.target_dims <= self.universe_size:
            raise InvalidInput("need 1 <= target_dims <= universe_size")

    @cached_property
    def _perm(self) -> MinHashFunction:
        return MinHashFunction(self.seed, self.universe_size)

    @cached_property
    def _width(self) -> int:
        return -(-self.universe_size // self.target_dims)  # ceil

    def _range_mins(self, s) -> tuple:
        arr = as_index_array(s)
        if arr.size == 0:
            raise InvalidInput("cannot reduce an empty set")
        p = self._perm.permute(arr).astype(np.int64)
        bins = p // self._width
        rel = p - bins * self._width
        order = np.argsort(bins, kind="stable")
        bins, rel = bins[order], rel[order]
        uniq, start = np.unique(bins, return_index=True)
        mins = np.minimum.reduceat(rel, start)
        return uniq, mins

    def reduce(self, s) -> np.ndarray:
        """Sorted unique token set over [0, target_dims)."""
        bins, mins = self._range_mins(s)
        tokens = (bins + (mins % _MERSENNE61)) % self.target_dims
        return np.unique(tokens)

    def reduce_dataset(self, sets) -> list:
        return [self.reduce(s) for s in sets]

    def sketch(self, s) -> np.ndarray:
        """Densified length-r vector of range-relative minima."""
        bins, mins = self._range_mins(s)
        r = self.target_dims
        out = np.full(r, -1, dtype=np.int64)
        out[bins] = mins
        empty = out < 0
        if empty.any():
            # borrow from the nearest occupied range to the right, circularly:
            # scan right-to-left twice so wrap-around sources propagate.
            carry = -1
            for j in range(2 * r - 1, -1, -1):
                jj = j % r
                if out[jj] >= 0:
                    carry = out[jj]
                elif carry >= 0:
                    out[jj] = carry
        return out
