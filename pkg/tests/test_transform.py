import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lshclust.data import (
    CategoricalData,
    DenseData,
    InvalidInput,
    MixedData,
    SparseData,
    jaccard_of_arrays,
)
from lshclust.transform import (
    HomoTransformParams,
    MinhashTransformParams,
    discretize_numeric,
    transform_hetero,
    transform_homo,
    transform_sparse,
)


def table_partition_ok(buckets, table, n):
    members = [b.members for b in buckets if b.table == table]
    flat = np.concatenate(members)
    return flat.size == n and np.array_equal(np.sort(flat), np.arange(n))


# --- dense ------------------------------------------------------------------


def test_six_point_example_table0_split(worked_dense_data, worked_transform_params):
    """Six objects whose table-0 projections order as 0 < 1 < 3 < 2 < 4 < 5;
    an even two-way split must give {0,1,3} and {2,4,5}."""
    buckets = transform_homo(worked_dense_data, worked_transform_params)
    t0 = [b for b in buckets if b.table == 0]
    assert t0[0].members.tolist() == [0, 1, 3]
    assert t0[1].members.tolist() == [2, 4, 5]


def test_six_point_example_all_tables(worked_dense_data, worked_transform_params):
    buckets = transform_homo(worked_dense_data, worked_transform_params)
    got = {(b.table, b.slot): b.members.tolist() for b in buckets}
    assert got == {
        (0, 0): [0, 1, 3], (0, 1): [2, 4, 5],
        (1, 0): [0, 1, 2], (1, 1): [3, 4, 5],
        (2, 0): [0, 1, 3], (2, 1): [2, 4, 5],
        (3, 0): [0, 1, 5], (3, 1): [2, 3, 4],
    }


def test_uneven_split_sizes():
    data = DenseData(np.arange(7, dtype=float).reshape(7, 1))
    buckets = transform_homo(data, HomoTransformParams(1, 2, directions=np.ones((1, 1))))
    assert sorted(b.members.size for b in buckets) == [3, 4]
    # ascending projections: the first bucket takes the extra element
    assert buckets[0].members.tolist() == [0, 1, 2, 3]


def test_n_equals_t_gives_singletons():
    data = DenseData(np.arange(5, dtype=float).reshape(5, 1))
    buckets = transform_homo(data, HomoTransformParams(2, 5, seed=3))
    assert all(b.members.size == 1 for b in buckets)


def test_t_larger_than_n_rejected():
    data = DenseData(np.zeros((3, 2)))
    with pytest.raises(InvalidInput):
        transform_homo(data, HomoTransformParams(1, 4, seed=0))


def test_homo_bucket_count_and_partition():
    rng = np.random.default_rng(0)
    data = DenseData(rng.standard_normal((57, 8)))
    params = HomoTransformParams(3, 10, seed=1)
    buckets = transform_homo(data, params)
    assert len(buckets) == 30
    for table in range(3):
        sizes = [b.members.size for b in buckets if b.table == table]
        assert max(sizes) - min(sizes) <= 1
        assert table_partition_ok(buckets, table, 57)


def test_homo_deterministic():
    rng = np.random.default_rng(5)
    data = DenseData(rng.standard_normal((40, 4)))
    params = HomoTransformParams(4, 8, seed=9)
    a = transform_homo(data, params)
    b = transform_homo(data, params)
    assert all(np.array_equal(x.members, y.members) for x, y in zip(a, b))


@given(st.integers(5, 60), st.integers(2, 5), st.integers(0, 1000))
@settings(max_examples=20, deadline=None)
def test_homo_partition_property(n, t, seed):
    rng = np.random.default_rng(seed)
    data = DenseData(rng.standard_normal((n, 3)))
    buckets = transform_homo(data, HomoTransformParams(2, t, seed=seed))
    for table in range(2):
        assert table_partition_ok(buckets, table, n)


# --- discretization ----------------------------------------------------------


def test_discretize_median_split():
    data = DenseData(np.array([[1.0], [2.0], [3.0], [4.0]]))
    out = discretize_numeric(data, 2)
    assert out.codes[:, 0].tolist() == [0, 0, 1, 1]


def test_discretize_constant_attribute_stays_balanced():
    data = DenseData(np.array([[7.0], [7.0], [7.0], [7.0]]))
    out = discretize_numeric(data, 2)
    assert out.codes[:, 0].tolist() == [0, 0, 1, 1]  # ties broken by id


def test_discretize_passes_categorical_through():
    data = MixedData(np.array([[0.5], [1.5]]), np.array([[7], [7]], dtype=np.int32))
    out = discretize_numeric(data, 2)
    assert out.codes[:, 1].tolist() == [7, 7]


def test_discretize_too_many_bins():
    data = DenseData(np.zeros((3, 1)))
    with pytest.raises(InvalidInput):
        discretize_numeric(data, 4)


# --- heterogeneous -----------------------------------------------------------


def test_hetero_identical_records_share_buckets():
    codes = np.array([[1, 2, 3], [1, 2, 3], [4, 5, 6]], dtype=np.int32)
    data = CategoricalData(codes)
    buckets, cat = transform_hetero(data, MinhashTransformParams(2, 4, seed=0))
    for table in range(4):
        slot_of = {}
        for b in buckets:
            if b.table == table:
                for m in b.members:
                    slot_of[int(m)] = b.slot
        assert slot_of[0] == slot_of[1]


def test_hetero_each_id_once_per_table():
    rng = np.random.default_rng(1)
    codes = rng.integers(0, 5, (30, 4)).astype(np.int32)
    data = CategoricalData(codes)
    L = 5
    buckets, _ = transform_hetero(data, MinhashTransformParams(2, L, seed=2))
    for table in range(L):
        assert table_partition_ok(buckets, table, 30)
    flat = np.concatenate([b.members for b in buckets])
    assert flat.size == 30 * L


def test_hetero_separates_two_patterns():
    # two well-separated attribute patterns; pattern Jaccard across groups is
    # low enough that most tables isolate them into exactly two buckets
    rng = np.random.default_rng(3)
    n, d, L = 100, 8, 8
    base = np.zeros((n, d), dtype=np.int32)
    labels = rng.integers(0, 2, n)
    base[labels == 0] = np.arange(d)
    base[labels == 1] = np.arange(d) + 100
    data = CategoricalData(base)
    buckets, _ = transform_hetero(data, MinhashTransformParams(2, L, seed=4))
    perfect = 0
    for table in range(L):
        tb = [b for b in buckets if b.table == table]
        if len(tb) == 2 and all(
            len(np.unique(labels[b.members])) == 1 for b in tb
        ):
            perfect += 1
    assert perfect >= L - 1


def test_hetero_discretizes_mixed_input():
    rng = np.random.default_rng(4)
    data = MixedData(rng.standard_normal((20, 2)), rng.integers(0, 3, (20, 1)).astype(np.int32))
    buckets, cat = transform_hetero(
        data, MinhashTransformParams(2, 2, seed=5, bins_per_attribute=4)
    )
    assert cat.dim == 3
    assert cat.codes[:, :2].max() < 4


# --- sparse -------------------------------------------------------------------


def test_sparse_identical_sets_cobucket_everywhere():
    sets = [[1, 5, 9], [1, 5, 9], [200, 300, 400]]
    data = SparseData(sets, universe=1 << 12)
    params = MinhashTransformParams(2, 4, seed=6, target_dims=64)
    buckets, reduced = transform_sparse(data, params)
    assert np.array_equal(reduced.sets[0], reduced.sets[1])
    for table in range(4):
        slot_of = {}
        for b in buckets:
            if b.table == table:
                for m in b.members:
                    slot_of[int(m)] = b.slot
        assert slot_of[0] == slot_of[1]


def test_sparse_per_table_multiplicity_one():
    rng = np.random.default_rng(7)
    sets = [np.unique(rng.integers(0, 1 << 14, 20)) for _ in range(25)]
    data = SparseData(sets, universe=1 << 14)
    buckets, _ = transform_sparse(data, MinhashTransformParams(2, 3, seed=8, target_dims=128))
    for table in range(3):
        assert table_partition_ok(buckets, table, 25)


def test_sparse_planted_clusters_cobucket():
    # 10 planted groups of near-duplicate sets: >= 90% of same-group pairs
    # co-bucket in at least half the tables
    rng = np.random.default_rng(9)
    K, L = 3, 20
    universe = 1 << 16
    bases = [np.sort(rng.choice(universe, 80, replace=False)) for _ in range(10)]
    sets, labels = [], []
    for g, base in enumerate(bases):
        for _ in range(10):
            keep = base[rng.random(base.size) < 0.99]
            extra = rng.choice(universe, 1, replace=False)
            sets.append(np.union1d(keep, extra))
            labels.append(g)
    labels = np.array(labels)
    # the construction keeps within-group pairwise Jaccard high and
    # cross-group essentially zero; verify before relying on it
    j01 = jaccard_of_arrays(np.asarray(sets[0]), np.asarray(sets[1]))
    assert j01 >= 0.9
    data = SparseData(sets, universe=universe)
    buckets, _ = transform_sparse(
        data, MinhashTransformParams(K, L, seed=10, target_dims=256)
    )
    slot = np.zeros((L, len(sets)), dtype=np.int64)
    for b in buckets:
        slot[b.table, b.members] = b.slot
    hits = total = 0
    for g in range(10):
        ids = np.flatnonzero(labels == g)
        for i in range(ids.size):
            for j in range(i + 1, ids.size):
                total += 1
                if (slot[:, ids[i]] == slot[:, ids[j]]).sum() >= L / 2:
                    hits += 1
    assert hits / total >= 0.9
