"""Command-line surface: gen | transform | seed | assign | run | bench.

`run` drives the partitioned-worker pipeline from a flat JSON config; the
stage subcommands read and write serialized artifacts so the phases can be
run separately; `bench` sweeps parameter grids and emits one metrics record
per cell.  Usage errors exit 2, runtime failures exit 1 with a stage label.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import io as dio
from . import serialize
from .assignment import assign
from .data import CategoricalData, DenseData, InvalidInput, MixedData, SparseData
from .engine import EngineError, PipelineConfig, WorkerConfig, run_pipeline
from .metrics import evaluate
from .seeding import SeedingParams, find_seed_groups, seeds_to_centers
from .synth import SyntheticSpec, gen_synthetic
from .transform import (
    HomoTransformParams,
    MinhashTransformParams,
    transform_hetero,
    transform_homo,
    transform_sparse,
)

GRID_T = (5000, 10000, 20000, 30000)
GRID_M = (20, 40, 60)
GRID_L = (10, 20, 30, 40)
DEFAULT_K = 3
DEFAULT_MIN_GROUP = 10


class UsageError(Exception):
    pass


def _load_data(path, kind, schema=None, dictionaries_out=None):
    if kind == "dense":
        return dio.read_fvecs(path)
    if kind == "sparse":
        return dio.read_sparse(path)
    if kind == "mixed":
        if schema is None:
            raise UsageError("mixed data needs --schema")
        data, dictionaries = dio.read_categorical_csv(path, schema)
        if dictionaries_out:
            Path(dictionaries_out).write_text(json.dumps(dictionaries, sort_keys=True))
        return data
    raise UsageError(f"unknown data kind {kind!r}")


def _check_metric(metric, kind):
    if metric == "euclidean" and kind != "dense":
        raise UsageError("euclidean metric applies to dense data only")
    if metric == "jaccard" and kind == "dense":
        raise UsageError("jaccard metric applies to mixed or sparse data")
    if metric not in ("euclidean", "jaccard"):
        raise UsageError(f"unknown metric {metric!r}")


def cmd_gen(args):
    spec = SyntheticSpec(
        kind=args.kind,
        n=args.n,
        dim=args.dim,
        clusters=args.clusters,
        separation=args.separation,
        seed=args.seed,
    )
    result = gen_synthetic(spec)
    out = Path(args.out)
    if isinstance(result.data, DenseData):
        dio.write_fvecs(out, result.data)
    elif isinstance(result.data, SparseData):
        dio.write_sparse(out, result.data)
    else:
        _write_categorical_csv(out, result.data)
    if args.labels:
        Path(args.labels).write_text(
            "".join(f"{int(l)}\n" for l in result.labels)
        )
    if args.meta:
        Path(args.meta).write_text(
            json.dumps(
                {
                    "kind": spec.kind,
                    "n": spec.n,
                    "dim": spec.dim,
                    "clusters": spec.clusters,
                    "true_radii": [float(r) for r in result.true_radii],
                },
                sort_keys=True,
            )
        )
    return 0


def _write_categorical_csv(out: Path, data: CategoricalData):
    names = [f"a{i}" for i in range(data.dim)]
    with open(out, "w") as fh:
        fh.write(",".join(names) + "\n")
        for row in data.codes:
            fh.write(",".join(f"v{int(c)}" for c in row) + "\n")
    schema = {"columns": [{"name": n, "kind": "categorical"} for n in names]}
    out.with_suffix(".schema.json").write_text(json.dumps(schema))


def cmd_transform(args):
    dicts_out = (
        str(Path(args.out).with_suffix(".dictionaries.json"))
        if args.kind == "mixed"
        else None
    )
    data = _load_data(args.data, args.kind, args.schema, dicts_out)
    if args.kind == "dense":
        params = HomoTransformParams(args.tables, args.buckets_per_table, args.seed)
        buckets = transform_homo(data, params)
        reduced = None
    else:
        params = MinhashTransformParams(
            args.num_hashes,
            args.tables,
            args.seed,
            bins_per_attribute=args.bins_per_attribute,
            target_dims=args.target_dims,
        )
        if args.kind == "mixed":
            buckets, reduced = transform_hetero(data, params)
        else:
            buckets, reduced = transform_sparse(data, params)
    Path(args.out).write_bytes(serialize.dump_buckets(buckets))
    if args.reduced_out and reduced is not None:
        if isinstance(reduced, SparseData):
            dio.write_sparse(args.reduced_out, reduced)
        else:
            _write_categorical_csv(Path(args.reduced_out), reduced)
    return 0


def cmd_seed(args):
    buckets = serialize.load_buckets(Path(args.buckets).read_bytes())
    params = SeedingParams(
        num_hashes=args.num_hashes,
        num_tables=args.tables,
        min_group_size=args.min_group_size,
        seed=args.seed,
    )
    groups = find_seed_groups(buckets, params, args.universe)
    Path(args.out).write_bytes(serialize.dump_seed_groups(groups))
    print(f"{len(groups)} seed groups")
    return 0


def cmd_assign(args):
    data = _load_data(args.data, args.kind, args.schema)
    _check_metric(args.metric, args.kind)
    groups = serialize.load_seed_groups(Path(args.seeds).read_bytes())
    t0 = time.perf_counter()
    centers = seeds_to_centers(groups, data)
    clustering = assign(data, centers, args.metric)
    seconds = time.perf_counter() - t0
    Path(args.out).write_bytes(serialize.dump_clustering(clustering))
    record = evaluate(clustering, stage_seconds={"assign": seconds})
    if args.metrics:
        Path(args.metrics).write_text(record.to_json())
    print(record.to_json())
    return 0


def _config_pipeline(cfg: dict) -> tuple:
    kind = cfg["data_kind"]
    metric = cfg["metric"]
    _check_metric(metric, kind)
    workers = WorkerConfig(
        num_workers=int(cfg.get("workers", 1)),
        memory_budget=int(cfg.get("memory_budget", 1 << 30)),
    )
    homo = minhash = None
    if kind == "dense":
        homo = HomoTransformParams(
            int(cfg.get("transform_tables", 8)),
            int(cfg.get("buckets_per_table", 64)),
            int(cfg.get("transform_seed", 1)),
        )
    else:
        minhash = MinhashTransformParams(
            int(cfg.get("num_hashes", DEFAULT_K)),
            int(cfg.get("transform_tables", 8)),
            int(cfg.get("transform_seed", 1)),
            bins_per_attribute=int(cfg.get("bins_per_attribute", 1024)),
            target_dims=int(cfg.get("target_dims", 400)),
        )
    seeding = SeedingParams(
        num_hashes=int(cfg.get("num_hashes", DEFAULT_K)),
        num_tables=int(cfg.get("seeding_tables", 10)),
        min_group_size=int(cfg.get("min_group_size", DEFAULT_MIN_GROUP)),
        seed=int(cfg.get("seeding_seed", 2)),
    )
    config = PipelineConfig(
        metric=metric,
        transform_kind=kind,
        workers=workers,
        homo=homo,
        minhash=minhash,
        seeding=seeding,
        passes=int(cfg.get("passes", 0)),
        fallback_seed=int(cfg.get("seeding_seed", 2)),
    )
    return config, cfg


def _run_once(data, config, echo) -> str:
    result = run_pipeline(data, config)
    record = evaluate(
        result.clustering,
        stage_seconds=result.timings,
        transport_bytes=result.transport_bytes,
        parameters=echo,
    )
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return record.to_json()


def cmd_run(args):
    cfg = json.loads(Path(args.config).read_text())
    config, echo = _config_pipeline(cfg)
    data = _load_data(
        cfg["data"], cfg["data_kind"], cfg.get("schema"), cfg.get("dictionaries")
    )
    line = _run_once(data, config, echo)
    if args.metrics:
        Path(args.metrics).write_text(line)
    print(line)
    return 0


def cmd_bench(args):
    cfg = json.loads(Path(args.config).read_text())
    grid_t = cfg.get("grid_t", list(GRID_T))
    grid_m = cfg.get("grid_m", list(GRID_M))
    grid_l = cfg.get("grid_L", list(GRID_L))
    data = _load_data(cfg["data"], cfg["data_kind"], cfg.get("schema"))
    lines = []
    for t in grid_t:
        for m in grid_m:
            for L in grid_l:
                cell = dict(cfg)
                cell["buckets_per_table"] = t
                cell["transform_tables"] = m
                cell["seeding_tables"] = L
                config, echo = _config_pipeline(cell)
                echo = {"t": t, "m": m, "L": L, **{k: v for k, v in echo.items() if not isinstance(v, (dict, list))}}
                lines.append(_run_once(data, config, echo))
    out = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)
    print(f"{len(lines)} records", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lshclust")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic dataset with ground truth")
    g.add_argument("--kind", required=True,
                   choices=["gaussian-mixture", "categorical-patterns", "sparse-overlap"])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--dim", type=int, required=True)
    g.add_argument("--clusters", type=int, required=True)
    g.add_argument("--separation", type=float, default=10.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--labels")
    g.add_argument("--meta")
    g.set_defaults(fn=cmd_gen)

    t = sub.add_parser("transform", help="convert a dataset into buckets")
    t.add_argument("--data", required=True)
    t.add_argument("--kind", required=True, choices=["dense", "mixed", "sparse"])
    t.add_argument("--schema")
    t.add_argument("--tables", type=int, default=8)
    t.add_argument("--buckets-per-table", type=int, default=64)
    t.add_argument("--num-hashes", type=int, default=DEFAULT_K)
    t.add_argument("--bins-per-attribute", type=int, default=1024)
    t.add_argument("--target-dims", type=int, default=400)
    t.add_argument("--seed", type=int, default=1)
    t.add_argument("--out", required=True)
    t.add_argument("--reduced-out")
    t.set_defaults(fn=cmd_transform)

    s = sub.add_parser("seed", help="derive seed groups from buckets")
    s.add_argument("--buckets", required=True)
    s.add_argument("--universe", type=int, required=True)
    s.add_argument("--num-hashes", type=int, default=DEFAULT_K)
    s.add_argument("--tables", type=int, default=10)
    s.add_argument("--min-group-size", type=int, default=DEFAULT_MIN_GROUP)
    s.add_argument("--seed", type=int, default=2)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_seed)

    a = sub.add_parser("assign", help="one-pass assignment from seed groups")
    a.add_argument("--data", required=True)
    a.add_argument("--kind", required=True, choices=["dense", "mixed", "sparse"])
    a.add_argument("--schema")
    a.add_argument("--seeds", required=True)
    a.add_argument("--metric", required=True)
    a.add_argument("--out", required=True)
    a.add_argument("--metrics")
    a.set_defaults(fn=cmd_assign)

    r = sub.add_parser("run", help="full pipeline from a JSON config")
    r.add_argument("--config", required=True)
    r.add_argument("--metrics")
    r.set_defaults(fn=cmd_run)

    b = sub.add_parser("bench", help="sweep parameter grids, one record per cell")
    b.add_argument("--config", required=True)
    b.add_argument("--out")
    b.set_defaults(fn=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (UsageError, KeyError, json.JSONDecodeError) as e:
        # malformed or incomplete configuration
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (EngineError, InvalidInput, serialize.FormatError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
