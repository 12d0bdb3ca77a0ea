"""Shared fixtures.

The six-object worked example is hand-constructed: eight buckets over ids
0..5 whose binning under the pinned hash seeds reproduces a fully worked-out
grouping (verified exhaustively over all 720 orderings when the seeds were
chosen; see scripts/find_fixture_seeds.py for the derivation).
"""

import numpy as np
import pytest

from lshclust.data import Bucket
from lshclust.seeding import SeedingParams
from lshclust.transform import HomoTransformParams

SIX = 6  # id universe of the worked example


def _bucket(table, slot, members):
    return Bucket(table, slot, np.array(sorted(members), dtype=np.int64))


@pytest.fixture
def worked_buckets():
    """Eight buckets with pinned binning structure.

    Under the seeds in `worked_params`, hash table 0 groups them into bins
    {B1,B3,B5,B7} and {B2,B6,B8} with {B4} dropped; table 1 yields bins
    voting {0,1,3} (a duplicate), {2,4}, and {5}; final groups after dedup
    are exactly {0,1,3}, {2,4,5}, {2,4}, {5}.
    """
    return [
        _bucket(0, 0, {0, 1, 3}),
        _bucket(0, 1, {2, 4, 5}),
        _bucket(1, 0, {0, 1, 3, 4}),
        _bucket(1, 1, {5}),
        _bucket(2, 0, {0, 1, 3, 5}),
        _bucket(2, 1, {2, 4}),
        _bucket(3, 0, {0, 1, 3, 5}),
        _bucket(3, 1, {4, 5}),
    ]


@pytest.fixture
def worked_params():
    return SeedingParams(
        num_hashes=2,
        num_tables=2,
        min_group_size=1,
        seed=0,
        dedup_tables=1,
        table_seeds=((6, 7), (15, 20)),
        dedup_seeds=((0, 1001),),
    )


# Partition-shaped variant fed end-to-end through the engine: the same six
# objects as a 4-d dataset whose per-table projections produce true even
# partitions, plus seeds under which seeding recovers the same four groups.

WORKED_POINTS = np.array(
    [
        [0.0, 0.0, 0.0, 0.0],
        [0.1, 0.1, 0.1, 0.1],
        [10.0, 0.2, 10.0, 0.3],
        [0.2, 0.3, 0.2, 0.4],
        [10.1, 0.4, 10.1, 0.5],
        [12.0, 0.5, 12.0, 0.2],
    ]
)


@pytest.fixture
def worked_dense_data():
    from lshclust.data import DenseData

    return DenseData(WORKED_POINTS)


@pytest.fixture
def worked_transform_params():
    return HomoTransformParams(
        num_tables=4, buckets_per_table=2, directions=np.eye(4)
    )


@pytest.fixture
def worked_pipeline_seeding():
    return SeedingParams(
        num_hashes=2,
        num_tables=2,
        min_group_size=1,
        seed=0,
        dedup_tables=1,
        table_seeds=((52, 3), (15, 63)),
        dedup_seeds=((0, 1001),),
    )
