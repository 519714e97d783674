"""Dimension reduction for finite point sets in l_p, 0 < p < 2, by weighted coordinate selection."""

__version__ = "0.1.0"

from .estimators import LpReducer, SnowflakeEmbedding, SpectralSparsifier
from .exceptions import ConstructionError, SparsifierBreakdown, ValidationError
from .pipeline import (
    DistortionReport,
    ReducedPointSet,
    ReductionConfig,
    measure_distortion,
    predicted_n,
    reduce_lp,
)
from .snowflake import (
    SnowflakeMap,
    audit_snowflake,
    build_snowflake_map,
    eval_snowflake,
    snowflake_distance,
)
from .sparsifier import SparseWeights, bss_sparsify, d_for_eps, verify_sandwich
from .subspace import (
    CoordinateSelection,
    orthonormal_basis,
    simultaneous_sparsify,
    verify_selection,
)

__all__ = [
    "ConstructionError",
    "CoordinateSelection",
    "DistortionReport",
    "LpReducer",
    "ReducedPointSet",
    "ReductionConfig",
    "SnowflakeEmbedding",
    "SnowflakeMap",
    "SparseWeights",
    "SparsifierBreakdown",
    "SpectralSparsifier",
    "ValidationError",
    "audit_snowflake",
    "bss_sparsify",
    "build_snowflake_map",
    "d_for_eps",
    "eval_snowflake",
    "measure_distortion",
    "orthonormal_basis",
    "predicted_n",
    "reduce_lp",
    "simultaneous_sparsify",
    "snowflake_distance",
    "verify_sandwich",
    "verify_selection",
]
