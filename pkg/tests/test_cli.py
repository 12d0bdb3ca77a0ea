import json

import numpy as np
import pytest

from lshclust.cli import main
from lshclust.metrics import MetricsRecord


def _gen(tmp_path, kind="gaussian-mixture", n=400, dim=8, clusters=5, sep=12.0):
    out = tmp_path / ("data.fvecs" if kind == "gaussian-mixture" else "data.txt")
    code = main(
        [
            "gen", "--kind", kind, "--n", str(n), "--dim", str(dim),
            "--clusters", str(clusters), "--separation", str(sep),
            "--seed", "0", "--out", str(out),
            "--labels", str(tmp_path / "labels.txt"),
            "--meta", str(tmp_path / "meta.json"),
        ]
    )
    assert code == 0
    return out


def _run_config(tmp_path, data, workers=1, **overrides):
    cfg = {
        "data": str(data),
        "data_kind": "dense",
        "metric": "euclidean",
        "workers": workers,
        "transform_tables": 8,
        "buckets_per_table": 20,
        "transform_seed": 1,
        "num_hashes": 3,
        "seeding_tables": 8,
        "min_group_size": 3,
        "seeding_seed": 2,
    }
    cfg.update(overrides)
    p = tmp_path / "config.json"
    p.write_text(json.dumps(cfg))
    return p


def test_gen_writes_data_labels_meta(tmp_path):
    data = _gen(tmp_path)
    assert data.exists()
    labels = (tmp_path / "labels.txt").read_text().splitlines()
    assert len(labels) == 400
    meta = json.loads((tmp_path / "meta.json").read_text())
    assert len(meta["true_radii"]) == 5


def test_gen_then_run_smoke(tmp_path, capsys):
    data = _gen(tmp_path)
    cfg = _run_config(tmp_path, data, workers=1)
    code = main(["run", "--config", str(cfg), "--metrics", str(tmp_path / "m.json")])
    assert code == 0
    record = MetricsRecord.from_json((tmp_path / "m.json").read_text())
    assert record.k_star >= 1


def test_run_reproducible_modulo_timing(tmp_path):
    data = _gen(tmp_path)
    cfg = _run_config(tmp_path, data, workers=2)
    for i in range(2):
        main(["run", "--config", str(cfg), "--metrics", str(tmp_path / f"m{i}.json")])
    a = MetricsRecord.from_json((tmp_path / "m0.json").read_text())
    b = MetricsRecord.from_json((tmp_path / "m1.json").read_text())
    a.stage_seconds = b.stage_seconds = {}
    assert a == b


def test_stagewise_transform_seed_assign(tmp_path):
    data = _gen(tmp_path)
    buckets = tmp_path / "buckets.bin"
    assert main([
        "transform", "--data", str(data), "--kind", "dense",
        "--tables", "8", "--buckets-per-table", "20", "--seed", "1",
        "--out", str(buckets),
    ]) == 0
    seeds = tmp_path / "seeds.bin"
    assert main([
        "seed", "--buckets", str(buckets), "--universe", "400",
        "--num-hashes", "3", "--tables", "8", "--min-group-size", "3",
        "--seed", "2", "--out", str(seeds),
    ]) == 0
    out = tmp_path / "clustering.bin"
    metrics = tmp_path / "metrics.json"
    assert main([
        "assign", "--data", str(data), "--kind", "dense", "--seeds", str(seeds),
        "--metric", "euclidean", "--out", str(out), "--metrics", str(metrics),
    ]) == 0
    record = MetricsRecord.from_json(metrics.read_text())
    assert record.k_star >= 1

    from lshclust import serialize

    clustering = serialize.load_clustering(out.read_bytes())
    assert clustering.assignment.size == 400


def test_stagewise_matches_engine_run(tmp_path):
    data = _gen(tmp_path)
    cfg = _run_config(tmp_path, data, workers=1)
    main(["run", "--config", str(cfg), "--metrics", str(tmp_path / "m.json")])
    engine_rec = MetricsRecord.from_json((tmp_path / "m.json").read_text())

    buckets = tmp_path / "buckets.bin"
    seeds = tmp_path / "seeds.bin"
    out = tmp_path / "c.bin"
    metrics = tmp_path / "m2.json"
    main(["transform", "--data", str(data), "--kind", "dense", "--tables", "8",
          "--buckets-per-table", "20", "--seed", "1", "--out", str(buckets)])
    main(["seed", "--buckets", str(buckets), "--universe", "400", "--num-hashes", "3",
          "--tables", "8", "--min-group-size", "3", "--seed", "2", "--out", str(seeds)])
    main(["assign", "--data", str(data), "--kind", "dense", "--seeds", str(seeds),
          "--metric", "euclidean", "--out", str(out), "--metrics", str(metrics)])
    stage_rec = MetricsRecord.from_json(metrics.read_text())
    assert stage_rec.k_star == engine_rec.k_star
    assert stage_rec.radii == engine_rec.radii


def test_bench_grid_counts_records(tmp_path):
    data = _gen(tmp_path)
    cfg = {
        "data": str(data),
        "data_kind": "dense",
        "metric": "euclidean",
        "workers": 1,
        "num_hashes": 3,
        "min_group_size": 3,
        "grid_t": [10, 20],
        "grid_m": [4, 8],
        "grid_L": [4, 8],
    }
    p = tmp_path / "bench.json"
    p.write_text(json.dumps(cfg))
    out = tmp_path / "results.jsonl"
    assert main(["bench", "--config", str(p), "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 8
    for line in lines:
        MetricsRecord.from_json(line)


def test_invalid_metric_pairing_is_usage_error(tmp_path):
    data = _gen(tmp_path)
    cfg = _run_config(tmp_path, data, metric="jaccard")
    assert main(["run", "--config", str(cfg)]) == 2


def test_unknown_subcommand_exits_2(capsys):
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2


def test_missing_file_is_runtime_error(tmp_path):
    cfg = _run_config(tmp_path, tmp_path / "nope.fvecs")
    assert main(["run", "--config", str(cfg)]) == 1


def test_sparse_gen_and_run(tmp_path):
    data = tmp_path / "sparse.txt"
    assert main([
        "gen", "--kind", "sparse-overlap", "--n", "120", "--dim", "4096",
        "--clusters", "4", "--seed", "3", "--out", str(data),
    ]) == 0
    cfg = {
        "data": str(data),
        "data_kind": "sparse",
        "metric": "jaccard",
        "workers": 2,
        "transform_tables": 4,
        "num_hashes": 2,
        "seeding_tables": 6,
        "min_group_size": 3,
        "target_dims": 256,
    }
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    assert main(["run", "--config", str(p), "--metrics", str(tmp_path / "m.json")]) == 0
    rec = MetricsRecord.from_json((tmp_path / "m.json").read_text())
    assert rec.k_star >= 1


def test_mixed_csv_run(tmp_path):
    data = tmp_path / "mixed.csv"
    rng = np.random.default_rng(0)
    rows = ["num,cat"]
    for i in range(60):
        rows.append(f"{rng.normal():.4f},c{rng.integers(0, 3)}")
    data.write_text("\n".join(rows) + "\n")
    schema = tmp_path / "schema.json"
    schema.write_text(json.dumps({"columns": [
        {"name": "num", "kind": "numeric"},
        {"name": "cat", "kind": "categorical"},
    ]}))
    cfg = {
        "data": str(data),
        "data_kind": "mixed",
        "schema": str(schema),
        "metric": "jaccard",
        "workers": 1,
        "transform_tables": 4,
        "num_hashes": 2,
        "seeding_tables": 4,
        "min_group_size": 2,
        "bins_per_attribute": 8,
    }
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    assert main(["run", "--config", str(p), "--metrics", str(tmp_path / "m.json")]) == 0


def test_mixed_transform_writes_dictionaries(tmp_path):
    data = tmp_path / "mixed.csv"
    data.write_text("cat\nred\nblue\nred\n")
    schema = tmp_path / "schema.json"
    schema.write_text(json.dumps({"columns": [{"name": "cat", "kind": "categorical"}]}))
    out = tmp_path / "buckets.bin"
    assert main([
        "transform", "--data", str(data), "--kind", "mixed", "--schema", str(schema),
        "--tables", "2", "--num-hashes", "2", "--seed", "1", "--out", str(out),
    ]) == 0
    dicts = json.loads(out.with_suffix(".dictionaries.json").read_text())
    assert dicts["cat"] == {"red": 0, "blue": 1}


def test_euclidean_on_sparse_is_usage_error(tmp_path):
    data = tmp_path / "sparse.txt"
    data.write_text("1 2 3\n4 5 6\n")
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "data": str(data), "data_kind": "sparse", "metric": "euclidean",
        "workers": 1,
    }))
    assert main(["run", "--config", str(cfg)]) == 2
