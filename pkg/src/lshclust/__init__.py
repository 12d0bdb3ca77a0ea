"""LSH bucket-based clustering toolkit."""

from .data import (
    Bucket,
    Bin,
    CategoricalData,
    CentralVector,
    Clustering,
    DenseData,
    InvalidInput,
    MixedData,
    SeedGroup,
    SparseData,
    dist_euclidean,
    dist_jaccard,
    categorical_tokens,
)
from .hashing import DophReducer, MinHashFunction, ProjectionFunction, SignatureScheme
from .transform import (
    HomoTransformParams,
    MinhashTransformParams,
    discretize_numeric,
    transform_hetero,
    transform_homo,
    transform_sparse,
)
from .seeding import (
    SeedingParams,
    bin_buckets,
    dedup_groups,
    find_seed_groups,
    majority_vote,
    seeds_to_centers,
)
from .assignment import assign, refine

__all__ = [
    "Bucket",
    "Bin",
    "CategoricalData",
    "CentralVector",
    "Clustering",
    "DenseData",
    "InvalidInput",
    "MixedData",
    "SeedGroup",
    "SparseData",
    "dist_euclidean",
    "dist_jaccard",
    "categorical_tokens",
    "DophReducer",
    "MinHashFunction",
    "ProjectionFunction",
    "SignatureScheme",
    "HomoTransformParams",
    "MinhashTransformParams",
    "discretize_numeric",
    "transform_hetero",
    "transform_homo",
    "transform_sparse",
    "SeedingParams",
    "bin_buckets",
    "dedup_groups",
    "find_seed_groups",
    "majority_vote",
    "seeds_to_centers",
    "assign",
    "refine",
]
