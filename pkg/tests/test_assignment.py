import numpy as np
import pytest

from lshclust.assignment import assign, refine, distance_matrix
from lshclust.data import (
    CategoricalData,
    CentralVector,
    DenseData,
    InvalidInput,
    SparseData,
    dist_euclidean,
    record_jaccard_distance,
)
from lshclust.synth import SyntheticSpec, gen_synthetic


def _centroids(rows):
    return [CentralVector("centroid", r) for r in rows]


def test_single_center_takes_everything():
    data = DenseData(np.array([[0.0], [1.0], [5.0]]))
    c = assign(data, _centroids([[1.0]]), "euclidean")
    assert c.assignment.tolist() == [0, 0, 0]
    assert c.radii[0] == pytest.approx(4.0)


def test_equidistant_tie_goes_to_lowest_index():
    data = DenseData(np.array([[0.0]]))
    centers = _centroids([[1.0], [2.0], [3.0], [-1.0]])
    c = assign(data, centers, "euclidean")
    assert c.assignment[0] == 0  # centers 0 and 3 tie at distance 1


def test_no_centers_rejected():
    data = DenseData(np.zeros((2, 2)))
    with pytest.raises(InvalidInput):
        assign(data, [], "euclidean")


def test_metric_payload_pairing_enforced():
    dense = DenseData(np.zeros((2, 2)))
    with pytest.raises(InvalidInput):
        assign(dense, [CentralVector("mode", [0, 0])], "euclidean")
    with pytest.raises(InvalidInput):
        assign(dense, _centroids([[0.0, 0.0]]), "jaccard")


def test_assignment_matches_brute_force_on_planted_clusters():
    res = gen_synthetic(SyntheticSpec("gaussian-mixture", 200, 8, 4, 12.0, 3))
    data = res.data
    means = np.stack(
        [data.vectors[res.labels == j].mean(axis=0) for j in range(4)]
    )
    c = assign(data, _centroids(means), "euclidean")
    assert np.array_equal(c.assignment, res.labels)
    # radii equal a brute-force max scan
    for j in range(4):
        members = data.vectors[res.labels == j]
        brute = max(dist_euclidean(x, means[j]) for x in members)
        assert c.radii[j] == pytest.approx(brute, abs=1e-12)


def test_assignment_independent_of_chunking(monkeypatch):
    rng = np.random.default_rng(0)
    data = DenseData(rng.standard_normal((100, 4)))
    centers = _centroids(rng.standard_normal((7, 4)))
    full = assign(data, centers, "euclidean")
    import lshclust.assignment as mod

    monkeypatch.setattr(mod, "CHUNK", 13)
    chunked = assign(data, centers, "euclidean")
    assert np.array_equal(full.assignment, chunked.assignment)
    assert np.array_equal(full.radii, chunked.radii)


def test_categorical_distance_matrix_matches_scalar():
    rng = np.random.default_rng(1)
    codes = rng.integers(0, 4, (20, 5)).astype(np.int32)
    data = CategoricalData(codes, code_space=4)
    centers = [CentralVector("mode", codes[i]) for i in (0, 7)]
    dm = distance_matrix(data, centers, "jaccard")
    for i in range(20):
        for j, c in enumerate(centers):
            assert dm[i, j] == pytest.approx(
                record_jaccard_distance(codes[i], c.values, 4)
            )


def test_sparse_assignment_against_set_arithmetic():
    sets = [[0, 1, 2], [0, 1, 3], [5, 6, 7]]
    data = SparseData(sets, universe=8)
    m0 = np.zeros(8, dtype=np.int32); m0[[0, 1, 2]] = 1
    m1 = np.zeros(8, dtype=np.int32); m1[[5, 6, 7]] = 1
    c = assign(data, [CentralVector("mode", m0), CentralVector("mode", m1)], "jaccard")
    assert c.assignment.tolist() == [0, 0, 1]
    assert c.radii[0] == pytest.approx(1 - 2 / 4)  # {0,1,3} vs {0,1,2}
    assert c.radii[1] == pytest.approx(0.0)


def test_refine_zero_passes_returns_input():
    data = DenseData(np.array([[0.0], [1.0]]))
    c = assign(data, _centroids([[0.2]]), "euclidean")
    assert refine(data, c, "euclidean", 0) is c


def test_refine_squared_objective_never_increases():
    from lshclust.assignment import squared_objective

    rng = np.random.default_rng(5)
    for trial in range(5):
        data = DenseData(rng.standard_normal((60, 3)))
        centers = _centroids(rng.standard_normal((6, 3)))
        c = assign(data, centers, "euclidean")
        prev = squared_objective(data, c, "euclidean")
        for _ in range(4):
            c = refine(data, c, "euclidean", 1)
            cur = squared_objective(data, c, "euclidean")
            assert cur <= prev + 1e-9
            prev = cur


def test_refine_two_points_two_centers_converges_to_zero_radius():
    data = DenseData(np.array([[0.0], [10.0]]))
    c = assign(data, _centroids([[4.0], [6.0]]), "euclidean")
    c = refine(data, c, "euclidean", 1)
    assert c.radii.tolist() == [0.0, 0.0]


def test_objective_equals_sum_of_min_distances():
    rng = np.random.default_rng(8)
    data = DenseData(rng.standard_normal((50, 4)))
    centers = _centroids(rng.standard_normal((5, 4)))
    c = assign(data, centers, "euclidean")
    dm = distance_matrix(data, centers, "euclidean")
    assert c.objective == pytest.approx(dm.min(axis=1).sum(), rel=1e-12)
