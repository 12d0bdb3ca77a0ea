"""Shared-nothing partitioned-worker engine.

g workers hold disjoint data shards and private state; everything crossing a
worker boundary travels as a serialized Message through an in-process
transport that counts bytes.  Phases run under barriers in worker-index
order, which is one valid schedule of the concurrent design and makes every
run bit-reproducible.

Pipeline: local hashing -> bucket synchronization (table i owned by worker
i mod g) -> local seeding with seed-group sync -> global centers from local
sums -> local assignment.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .data import (
    Bucket,
    CategoricalData,
    Clustering,
    CentralVector,
    DenseData,
    InvalidInput,
    MixedData,
    SeedGroup,
    SparseData,
)
from .seeding import SeedingParams, collect_votes, dedup_groups
from .transform import (
    HomoTransformParams,
    MinhashTransformParams,
    discretize_numeric,
    even_partition_sizes,
)
from .hashing import DophReducer, derive_seed
from .numeric import exact_column_sums, exact_centroid_from_sums
from . import serialize
from .assignment import assign as assign_local


class EngineError(RuntimeError):
    """A pipeline stage failed; the message names the stage and worker."""


@dataclass(frozen=True)
class WorkerConfig:
    """Worker count, the per-load bucket byte budget for seeding, and the
    transport channel descriptor (only in-process channels exist today; a
    socket transport can slot in without touching phase logic).

    Table counts that are divisible by g balance the synced load exactly;
    other counts still run, just less evenly.
    """

    num_workers: int
    memory_budget: int = 1 << 30
    transport: str = "in-process"

    def __post_init__(self):
        if self.num_workers < 1:
            raise InvalidInput("need at least one worker")
        if self.memory_budget <= 0:
            raise InvalidInput("memory budget must be positive")
        if self.transport != "in-process":
            raise InvalidInput(f"unknown transport {self.transport!r}")


@dataclass
class Message:
    kind: str  # BucketShard | SeedGroups | LocalCenters | Assignments
    sender: int
    payload: bytes


class Transport:
    """In-process mailboxes with delivery byte accounting per message kind."""

    def __init__(self, num_workers: int):
        self.boxes = [[] for _ in range(num_workers)]
        self.bytes_by_kind = {}

    def send(self, dest: int, msg: Message):
        if not 0 <= dest < len(self.boxes):
            raise EngineError(f"transport: no worker {dest}")
        self.bytes_by_kind[msg.kind] = (
            self.bytes_by_kind.get(msg.kind, 0) + len(msg.payload)
        )
        self.boxes[dest].append(msg)

    def broadcast(self, sender: int, msg: Message):
        for dest in range(len(self.boxes)):
            if dest != sender:
                self.send(dest, msg)

    def drain(self, dest: int, kind: str) -> list:
        taken = [m for m in self.boxes[dest] if m.kind == kind]
        self.boxes[dest] = [m for m in self.boxes[dest] if m.kind != kind]
        return sorted(taken, key=lambda m: m.sender)

    @property
    def total_bytes(self) -> int:
        return sum(self.bytes_by_kind.values())


def split_data(n: int, g: int) -> list:
    """Contiguous id ranges of near-equal size, one per worker."""
    if g > n:
        raise InvalidInput(f"cannot split {n} objects across {g} workers")
    sizes = even_partition_sizes(n, g)
    bounds = np.concatenate(([0], np.cumsum(sizes)))
    return [(int(bounds[i]), int(bounds[i + 1])) for i in range(g)]


def _slice_data(data, lo, hi):
    if isinstance(data, DenseData):
        return DenseData(data.vectors[lo:hi])
    if isinstance(data, CategoricalData):
        return CategoricalData(data.codes[lo:hi], data.code_space)
    return SparseData(data.sets[lo:hi], data.universe)


@dataclass
class PipelineConfig:
    """Everything a run needs; JSON-friendly (see cli)."""

    metric: str  # "euclidean" | "jaccard"
    transform_kind: str  # "dense" | "mixed" | "sparse"
    workers: WorkerConfig
    homo: HomoTransformParams = None
    minhash: MinhashTransformParams = None
    seeding: SeedingParams = None
    passes: int = 0
    fallback_seed: int = 0

    def table_count(self) -> int:
        if self.transform_kind == "dense":
            return self.homo.num_tables
        return self.minhash.num_tables


@dataclass
class PipelineResult:
    clustering: Clustering
    seed_groups: list
    timings: dict  # stage -> seconds (max over workers)
    transport_bytes: dict  # message kind -> bytes
    k_star: int
    warnings: list = field(default_factory=list)


class Worker:
    """One shard's private state; touches other workers only via transport."""

    def __init__(self, index: int, config: PipelineConfig, transport: Transport, n: int):
        self.index = index
        self.config = config
        self.transport = transport
        self.n = n
        self.lo = self.hi = 0
        self.shard = None
        self.tables = {}  # owned table index -> list[Bucket]
        self.seed_groups = []
        self.centers = []
        self.assignment = None
        self.best_dist = None

    # --- phase 1: local hashing over the shard ---------------------------

    def hash_shard(self):
        cfg = self.config
        if cfg.transform_kind == "dense":
            p = cfg.homo
            fragments = {}
            for table in range(p.num_tables):
                proj = p.projection(table, self.shard.dim)
                values = self.shard.vectors @ proj.direction
                fragments[table] = ("proj", values)
            return fragments
        # signature transforms: per table, (signature rows, local ids)
        p = cfg.minhash
        if cfg.transform_kind == "mixed":
            sets = [row for row in _tokenized(self.shard)]
            universe = _token_universe(self.shard)
        else:
            sets = self.shard.sets
            universe = self.shard.universe
        scheme = p.scheme(universe)
        fragments = {}
        for table in range(p.num_tables):
            fragments[table] = ("sig", scheme.signatures_for_sets(table, sets))
        return fragments

    # --- phase 2: bucket synchronization ----------------------------------

    def send_fragments(self, fragments, g):
        for table, (kind, body) in fragments.items():
            owner = table % g
            payload = serialize.pack_fragment(table, kind, self.lo, body)
            msg = Message("BucketShard", self.index, payload)
            if owner == self.index:
                self.transport.boxes[self.index].append(msg)  # local, no bytes
            else:
                self.transport.send(owner, msg)

    def build_tables(self):
        cfg = self.config
        t = cfg.homo.buckets_per_table if cfg.transform_kind == "dense" else None
        parts = {}
        for msg in self.transport.drain(self.index, "BucketShard"):
            table, kind, lo, body = serialize.unpack_fragment(msg.payload)
            parts.setdefault(table, []).append((lo, kind, body))
        for table, chunks in sorted(parts.items()):
            chunks.sort()
            if chunks[0][1] == "proj":
                values = np.concatenate([c[2] for c in chunks])
                order = np.lexsort((np.arange(self.n), values))
                bounds = np.cumsum(even_partition_sizes(self.n, t))[:-1]
                buckets = [
                    Bucket(table, slot, np.sort(ids))
                    for slot, ids in enumerate(np.split(order, bounds))
                ]
            else:
                sig = np.concatenate([c[2] for c in chunks])
                ids = np.concatenate(
                    [np.arange(lo, lo + c.shape[0]) for lo, _, c in chunks]
                )
                _, inverse = np.unique(sig, axis=0, return_inverse=True)
                order = np.argsort(inverse, kind="stable")
                groups = np.split(order, np.cumsum(np.bincount(inverse))[:-1])
                buckets = [
                    Bucket(table, slot, np.sort(ids[g_]))
                    for slot, g_ in enumerate(groups)
                ]
            self.tables[table] = buckets

    # --- phase 3: local seeding + seed-group sync --------------------------

    def local_votes(self):
        """Bin + vote + size filter over this worker's tables.

        Signatures are computed in loads of whole tables whose member bytes
        fit the memory budget; voting then walks the grouped buckets.  The
        output equals a single-load run exactly, whatever the budget.
        """
        cfg = self.config
        params = cfg.seeding
        budget = cfg.workers.memory_budget
        tables = [self.tables[t] for t in sorted(self.tables)]
        chunks = _chunk_tables(tables, budget)
        # pass 1: bucket signatures per seeding table, loaded chunk by chunk
        scheme = params.scheme(self.n)
        keys = []  # per bucket, tuple of signatures across seeding tables
        buckets_flat = []
        for chunk in chunks:
            flat = [b for tbl in chunk for b in tbl]
            members = [b.members for b in flat]
            sigs = [
                scheme.signatures_for_sets(st, members)
                for st in range(params.num_tables)
            ]
            for j, b in enumerate(flat):
                keys.append(tuple(tuple(s[j].tolist()) for s in sigs))
            buckets_flat.extend(flat)
        # pass 2: group by per-seeding-table signature, vote
        groups = []
        for st in range(params.num_tables):
            by_sig = {}
            for idx, key in enumerate(keys):
                by_sig.setdefault(key[st], []).append(idx)
            for sig in sorted(by_sig):
                idxs = by_sig[sig]
                if len(idxs) < 2:
                    continue
                parts = [buckets_flat[i].members for i in idxs]
                ids, counts = np.unique(np.concatenate(parts), return_counts=True)
                winners = ids[2 * counts > len(parts)]
                if winners.size >= params.min_group_size and winners.size > 0:
                    groups.append(SeedGroup(winners))
        return groups

    def sync_seed_groups(self, local_groups):
        payload = serialize.pack_seed_groups(local_groups)
        self.transport.broadcast(self.index, Message("SeedGroups", self.index, payload))
        self._own_groups = local_groups

    def finish_seeding(self):
        merged = list(self._own_groups)
        for msg in self.transport.drain(self.index, "SeedGroups"):
            merged.extend(serialize.unpack_seed_groups(msg.payload))
        merged.sort(key=lambda g_: g_.key())
        self.seed_groups = dedup_groups(merged, self.config.seeding, self.n)

    # --- phase 4: centers from local sums ----------------------------------

    def local_center_stats(self, groups):
        """Per group, the local member contribution: exact scaled-integer
        coordinate sums for centroids, per-attribute value counts for
        modes.  Exact sums make the global reduction independent of how the
        members are split across workers."""
        stats = []
        for g_ in groups:
            mine = g_.members[(g_.members >= self.lo) & (g_.members < self.hi)]
            local = mine - self.lo
            if isinstance(self.shard, DenseData):
                sums = exact_column_sums(self.shard.vectors[local])
                stats.append((sums, int(local.size)))
            elif isinstance(self.shard, CategoricalData):
                counts = np.zeros(
                    (self.shard.dim, self.shard.code_space), dtype=np.int64
                )
                for row in self.shard.codes[local]:
                    counts[np.arange(self.shard.dim), row] += 1
                stats.append((counts, int(local.size)))
            else:
                counts = np.zeros(self.shard.universe, dtype=np.int64)
                for i in local:
                    counts[self.shard.sets[int(i)]] += 1
                stats.append((counts, int(local.size)))
        return stats

    # --- phase 5: local assignment -----------------------------------------

    def assign_shard(self, centers, metric):
        clustering = assign_local(self.shard, centers, metric)
        self.assignment = clustering.assignment
        self.best_dist = _member_distances(self.shard, clustering)
        return clustering


def _member_distances(shard, clustering):
    # recover per-object distance to its assigned center from radii speedily:
    # assign() does not return them, so recompute per chunk
    from .assignment import distance_matrix

    n = shard.n
    out = np.empty(n, dtype=np.float64)
    metric = "euclidean" if isinstance(shard, DenseData) else "jaccard"
    for lo in range(0, n, 8192):
        rows = np.arange(lo, min(lo + 8192, n))
        dm = distance_matrix(shard, clustering.centers, metric, rows)
        out[rows] = dm[np.arange(rows.size), clustering.assignment[rows]]
    return out


def _tokenized(data: CategoricalData) -> list:
    from .data import tokenize_categorical

    return tokenize_categorical(data)


def _token_universe(data: CategoricalData) -> int:
    return data.dim * data.code_space


def _chunk_tables(tables, budget: int) -> list:
    """Whole tables greedily packed so member bytes stay within budget."""
    sizes = [sum(8 * b.members.size for b in tbl) for tbl in tables]
    for tbl, s in zip(tables, sizes):
        if s > budget:
            raise EngineError(
                f"memory budget {budget} below single table of {s} bytes"
            )
    chunks, cur, used = [], [], 0
    for tbl, s in zip(tables, sizes):
        if cur and used + s > budget:
            chunks.append(cur)
            cur, used = [], 0
        cur.append(tbl)
        used += s
    if cur:
        chunks.append(cur)
    return chunks


def _prepare_global(data, config: PipelineConfig):
    """Dataset-wide preprocessing that must agree across workers:
    discretization for mixed data, dimensionality reduction for sparse."""
    if config.transform_kind == "mixed":
        if isinstance(data, (MixedData, DenseData)):
            return discretize_numeric(data, config.minhash.bins_per_attribute)
        return data
    if config.transform_kind == "sparse":
        p = config.minhash
        if p.target_dims > data.universe:
            return data
        reducer = DophReducer(derive_seed(p.seed, 0xD0), data.universe, p.target_dims)
        return SparseData(reducer.reduce_dataset(data.sets), p.target_dims)
    return data


def run_pipeline(data, config: PipelineConfig) -> PipelineResult:
    """Execute transform -> bucket sync -> seeding -> centers -> assignment
    across g in-process workers and merge the result."""
    g = config.workers.num_workers
    warnings = []
    timings = {}
    transport = Transport(g)

    def timed(stage, fn):
        worst = 0.0
        results = []
        for w in workers:
            t0 = time.perf_counter()
            try:
                results.append(fn(w))
            except (InvalidInput, EngineError) as e:
                raise EngineError(f"stage {stage}, worker {w.index}: {e}") from e
            worst = max(worst, time.perf_counter() - t0)
        timings[stage] = timings.get(stage, 0.0) + worst
        return results

    try:
        prepared = _prepare_global(data, config)
        n = prepared.n
        shards = split_data(n, g)
    except InvalidInput as e:
        raise EngineError(f"stage setup: {e}") from e
    workers = [Worker(i, config, transport, n) for i in range(g)]
    for w, (lo, hi) in zip(workers, shards):
        w.lo, w.hi = lo, hi
        w.shard = _slice_data(prepared, lo, hi)

    fragments = timed("transform", lambda w: w.hash_shard())
    timed("sync_buckets", lambda w: w.send_fragments(fragments[w.index], g))
    timed("sync_buckets", lambda w: w.build_tables())

    local = timed("seeding", lambda w: w.local_votes())
    timed("seeding", lambda w: w.sync_seed_groups(local[w.index]))
    timed("seeding", lambda w: w.finish_seeding())

    groups = workers[0].seed_groups
    for w in workers[1:]:
        if [g_.key() for g_ in w.seed_groups] != [g_.key() for g_ in groups]:
            raise EngineError("seed groups diverged across workers")
    if not groups:
        warnings.append("seeding produced no groups; falling back to one random seed per worker")
        rng = np.random.default_rng(config.fallback_seed)
        picks = sorted(
            int(rng.integers(lo, hi)) for lo, hi in shards
        )
        groups = [SeedGroup(np.array([p])) for p in picks]
        for w in workers:
            w.seed_groups = groups

    centers = _global_centers(workers, groups, prepared, timed, warnings)
    if not centers:
        raise EngineError("stage centers: no non-empty seed group")

    clusterings = timed("assign", lambda w: w.assign_shard(centers, config.metric))
    assignment = np.concatenate([c.assignment for c in clusterings])
    dists = np.concatenate([w.best_dist for w in workers])
    merged = Clustering(
        centers=centers,
        assignment=assignment,
        radii=_radii(assignment, dists, len(centers)),
        objective=float(dists.sum()),
    )
    for _ in range(config.passes):
        merged = _refine_distributed(workers, merged, prepared, config, timed)

    return PipelineResult(
        clustering=merged,
        seed_groups=groups,
        timings=timings,
        transport_bytes=dict(transport.bytes_by_kind),
        k_star=merged.k_star,
        warnings=warnings,
    )


def _radii(assignment, dists, k):
    radii = np.zeros(k, dtype=np.float64)
    np.maximum.at(radii, assignment, dists)
    return radii


def _global_centers(workers, groups, data, timed, warnings):
    """Reduce per-worker stats in worker-index order.

    Centroid sums are exact integers and mode counts plain integers, so the
    result is identical for every worker count.
    """
    stats = timed("centers", lambda w: w.local_center_stats(groups))
    for w in workers:  # stats ride the transport as LocalCenters messages
        payload = serialize.pack_center_stats(stats[w.index])
        w.transport.broadcast(w.index, Message("LocalCenters", w.index, payload))
    centers = []
    dense = isinstance(data, DenseData)
    for gi, g_ in enumerate(groups):
        total = None
        count = 0
        for w_stats in stats:  # fixed worker order
            part, c = w_stats[gi]
            if total is None:
                total = [int(x) for x in part] if dense else part.copy()
            elif dense:
                total = [a + int(b) for a, b in zip(total, part)]
            else:
                total = total + part
            count += c
        if count == 0:
            warnings.append(f"seed group {gi} has no members on any worker; dropped")
            continue
        if dense:
            centers.append(
                CentralVector("centroid", exact_centroid_from_sums(total, count), count)
            )
        elif isinstance(data, CategoricalData):
            centers.append(CentralVector("mode", np.argmax(total, axis=1).astype(np.int32), count))
        else:
            centers.append(CentralVector("mode", (2 * total > count).astype(np.int32), count))
    return centers


def _refine_distributed(workers, clustering, data, config, timed):
    """One distributed refinement pass: global centers from the current
    assignment, then local reassignment."""
    k = len(clustering.centers)
    groups = []
    for j in range(k):
        members = np.flatnonzero(clustering.assignment == j)
        if members.size:
            groups.append(SeedGroup(members))
    centers = _global_centers(workers, groups, data, timed, [])
    clusterings = timed("assign", lambda w: w.assign_shard(centers, config.metric))
    assignment = np.concatenate([c.assignment for c in clusterings])
    dists = np.concatenate([w.best_dist for w in workers])
    return Clustering(
        centers=centers,
        assignment=assignment,
        radii=_radii(assignment, dists, len(centers)),
        objective=float(dists.sum()),
    )
