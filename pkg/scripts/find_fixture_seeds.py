"""Derive and verify the six-object worked-example fixtures used in tests.

The test suite pins two hand-analyzed fixtures over ids 0..5:

  * a bucket collection whose binning structure, majority votes, worker-local
    votes, and dedup behavior are all known in closed form;
  * a 6-point dataset with per-table basis projections whose even two-way
    splits produce a partition-shaped bucket collection feeding the full
    pipeline.

Hash seeds cannot be chosen analytically, so this script searches them: a
candidate seed is accepted when the induced permutation of {0..5} gives every
bucket the required minimum element (which fully determines the binning).
Run it to re-derive the constants frozen in tests/conftest.py.
"""

import numpy as np

from lshclust.data import Bucket
from lshclust.hashing import MinHashFunction
from lshclust.seeding import SeedingParams, collect_votes, find_seed_groups

HAND_BUCKETS = [
    (0, 0, (0, 1, 3)),
    (0, 1, (2, 4, 5)),
    (1, 0, (0, 1, 3, 4)),
    (1, 1, (5,)),
    (2, 0, (0, 1, 3, 5)),
    (2, 1, (2, 4)),
    (3, 0, (0, 1, 3, 5)),
    (3, 1, (4, 5)),
]

PIPELINE_BUCKETS = [
    (0, 0, (0, 1, 3)),
    (0, 1, (2, 4, 5)),
    (1, 0, (0, 1, 2)),
    (1, 1, (3, 4, 5)),
    (2, 0, (0, 1, 3)),
    (2, 1, (2, 4, 5)),
    (3, 0, (0, 1, 5)),
    (3, 1, (2, 3, 4)),
]


def rank_of(seed):
    return MinHashFunction(seed, 6).permute(np.arange(6))


def min_elements(rank, members_list):
    return tuple(
        int(min(m, key=lambda e: rank[e])) for m in members_list
    )


def find_seed(members_list, target, start=0, avoid=()):
    seed = start
    while seed < 500_000:
        if seed not in avoid and min_elements(rank_of(seed), members_list) == target:
            return seed
        seed += 1
    raise RuntimeError("seed search exhausted")


def constraint_targets(members_list, predicate):
    """All reachable min-element vectors whose inducing order satisfies a
    rank predicate; used to express 'any order with this shape works'."""
    import itertools

    out = set()
    for perm in itertools.permutations(range(6)):
        rank = [0] * 6
        for r, e in enumerate(perm):
            rank[e] = r
        if predicate(rank):
            out.add(min_elements(rank, members_list))
    return sorted(out)


def main():
    hand = [m for _, _, m in HAND_BUCKETS]
    m013 = lambda r: min(r[0], r[1], r[3])
    # table 0: shared minimum inside {0,1,3} for the four cored buckets,
    # element 4 pivots the other bin, the singleton stays alone
    t0 = find_seed(hand, min(constraint_targets(
        hand, lambda r: m013(r) < r[4] < r[2] and r[4] < r[5])))
    t0b = find_seed(hand, min_elements(rank_of(t0), hand), start=t0 + 1)
    # table 1: element 2 bottom, then 5, then {0,1,3}, with 4 above them
    t1 = find_seed(hand, min(constraint_targets(
        hand, lambda r: r[2] < r[5] < m013(r) < r[4])))
    t1b = find_seed(hand, min_elements(rank_of(t1), hand), start=t1 + 1)
    # dedup pair: separate {2,4,5} / {2,4} / {5} / {0,1,3} jointly
    groups = [(0, 1, 3), (2, 4, 5), (2, 4), (5,)]
    d0 = find_seed(groups, min(constraint_targets(
        groups, lambda r: r[5] < r[2] and r[5] < r[4])))
    d1 = find_seed(groups, min(constraint_targets(
        groups, lambda r: min(r[2], r[4]) < r[5])), start=1000)
    print(f"hand fixture: table_seeds=(({t0}, {t0b}), ({t1}, {t1b})), dedup_seeds=(({d0}, {d1}),)")

    params = SeedingParams(2, 2, 1, seed=0, dedup_tables=1,
                           table_seeds=((t0, t0b), (t1, t1b)),
                           dedup_seeds=((d0, d1),))
    buckets = [Bucket(t, s, np.array(m)) for t, s, m in HAND_BUCKETS]
    final = find_seed_groups(buckets, params, 6)
    print("  final groups:", [g.members.tolist() for g in final])
    print("  pre-dedup:", [g.members.tolist() for g in collect_votes(buckets, params, 6)])

    pipe = [m for _, _, m in PIPELINE_BUCKETS]
    # pick vectors giving three cored buckets one bin and isolating the rest;
    # verified by running the seeding end to end below
    p0a = find_seed(pipe, (0, 2, 0, 3, 0, 2, 0, 2))
    p0b = find_seed(pipe, (0, 2, 2, 3, 0, 2, 0, 2))
    p1a = find_seed(pipe, (0, 2, 2, 5, 0, 2, 5, 2))
    p1b = find_seed(pipe, (0, 2, 2, 5, 0, 2, 5, 2), start=p1a + 1)
    print(f"pipeline fixture: table_seeds=(({p0a}, {p0b}), ({p1a}, {p1b})), dedup_seeds=(({d0}, {d1}),)")
    params = SeedingParams(2, 2, 1, seed=0, dedup_tables=1,
                           table_seeds=((p0a, p0b), (p1a, p1b)),
                           dedup_seeds=((d0, d1),))
    buckets = [Bucket(t, s, np.array(m)) for t, s, m in PIPELINE_BUCKETS]
    final = find_seed_groups(buckets, params, 6)
    print("  final groups:", [g.members.tolist() for g in final])


if __name__ == "__main__":
    main()
