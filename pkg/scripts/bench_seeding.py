"""Compare seeding methods: bucket-vote seeding vs distance-weighted and
random seeding, each followed by one-pass assignment.

Sweeps bucket granularity to move k*, then times every method at the
matched k and reports seeding seconds plus mean/max radius.

    python scripts/bench_seeding.py --n 50000 --dim 16 --clusters 200
"""

import argparse
import time

import numpy as np

from lshclust.assignment import assign
from lshclust.baselines import seed_kmeanspp, seed_random
from lshclust.metrics import evaluate
from lshclust.seeding import SeedingParams, find_seed_groups, seeds_to_centers
from lshclust.synth import SyntheticSpec, gen_synthetic
from lshclust.transform import HomoTransformParams, transform_homo


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=50_000)
    ap.add_argument("--dim", type=int, default=16)
    ap.add_argument("--clusters", type=int, default=200)
    ap.add_argument("--separation", type=float, default=15.0)
    ap.add_argument("--tables", type=int, default=16)
    ap.add_argument("--seeding-tables", type=int, default=16)
    ap.add_argument("--grid-t", type=int, nargs="+", default=[100, 200, 500, 1000])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    res = gen_synthetic(
        SyntheticSpec(
            "gaussian-mixture", args.n, args.dim, args.clusters, args.separation, args.seed
        )
    )
    data = res.data
    print(f"{'t':>6} {'k*':>6} | {'bucket-vote':>18} | {'kmeans++':>18} | {'random':>18}")
    print(f"{'':>6} {'':>6} | {'sec':>8} {'radius':>9} | {'sec':>8} {'radius':>9} | {'sec':>8} {'radius':>9}")
    for t in args.grid_t:
        buckets = transform_homo(data, HomoTransformParams(args.tables, t, seed=1))
        params = SeedingParams(3, args.seeding_tables, min_group_size=5, seed=2)
        t0 = time.perf_counter()
        groups = find_seed_groups(buckets, params, data.n)
        vote_sec = time.perf_counter() - t0
        if not groups:
            print(f"{t:>6}   (no groups)")
            continue
        clustering = assign(data, seeds_to_centers(groups, data), "euclidean")
        k = clustering.k_star
        vote_rec = evaluate(clustering)

        t0 = time.perf_counter()
        pp_centers = seed_kmeanspp(data, k, args.seed + 1)
        pp_sec = time.perf_counter() - t0
        pp = evaluate(assign(data, pp_centers, "euclidean"))

        t0 = time.perf_counter()
        rnd_centers = seed_random(data, k, args.seed + 1)
        rnd_sec = time.perf_counter() - t0
        rnd = evaluate(assign(data, rnd_centers, "euclidean"))

        print(
            f"{t:>6} {k:>6} | {vote_sec:>8.2f} {vote_rec.mean_radius:>9.3f}"
            f" | {pp_sec:>8.2f} {pp.mean_radius:>9.3f}"
            f" | {rnd_sec:>8.2f} {rnd.mean_radius:>9.3f}"
        )


if __name__ == "__main__":
    main()
