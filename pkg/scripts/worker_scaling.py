"""Run the full pipeline at several worker counts and report per-stage
seconds, transport bytes, and result quality.

    python scripts/worker_scaling.py --n 20000 --clusters 50 --workers 1 2 4
"""

import argparse

from lshclust.engine import PipelineConfig, WorkerConfig, run_pipeline
from lshclust.metrics import evaluate
from lshclust.seeding import SeedingParams
from lshclust.synth import SyntheticSpec, gen_synthetic
from lshclust.transform import HomoTransformParams


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=20_000)
    ap.add_argument("--dim", type=int, default=16)
    ap.add_argument("--clusters", type=int, default=50)
    ap.add_argument("--separation", type=float, default=20.0)
    ap.add_argument("--tables", type=int, default=16)
    ap.add_argument("--buckets-per-table", type=int, default=200)
    ap.add_argument("--seeding-tables", type=int, default=16)
    ap.add_argument("--min-group-size", type=int, default=5)
    ap.add_argument("--workers", type=int, nargs="+", default=[1, 2, 4])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    res = gen_synthetic(
        SyntheticSpec(
            "gaussian-mixture", args.n, args.dim, args.clusters, args.separation, args.seed
        )
    )
    for g in args.workers:
        config = PipelineConfig(
            metric="euclidean",
            transform_kind="dense",
            workers=WorkerConfig(g),
            homo=HomoTransformParams(args.tables, args.buckets_per_table, seed=1),
            seeding=SeedingParams(
                3, args.seeding_tables, min_group_size=args.min_group_size, seed=2
            ),
        )
        out = run_pipeline(res.data, config)
        rec = evaluate(out.clustering, stage_seconds=out.timings,
                       transport_bytes=out.transport_bytes)
        stages = " ".join(f"{k}={v:.3f}s" for k, v in rec.stage_seconds.items())
        total_bytes = sum(rec.transport_bytes.values())
        print(
            f"g={g}: k*={rec.k_star} mean_radius={rec.mean_radius:.3f} "
            f"max_radius={rec.max_radius:.3f} bytes={total_bytes} | {stages}"
        )


if __name__ == "__main__":
    main()
