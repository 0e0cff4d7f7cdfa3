"""Exact non-commutative rank, semi-stability witnesses and nc hom/ext."""
from .errors import (
    DimensionError,
    FieldSizeWarning,
    FieldTooSmallError,
    InternalInvariantError,
    InvalidSubrepError,
    NcrankError,
    OracleInfeasibleError,
    ProbabilisticFailure,
    UnsupportedInstanceError,
    ValidationError,
)
from .exactlin import Field, Subspace, kernel, pseudo_inverse, rank, rref
from .homext import nc_hom_ext, nchom, ncext, ncext_fixed_source, nchom_fixed_source
from .matspace import (
    Config,
    MatrixSpace,
    blow_up,
    ncrk,
    rank_of_space,
    shrunk_from_wong,
    wong_sequence,
)
from .quiver import Arrow, Quiver, Representation, Subrepresentation, euler_form, subrep_closure
from .reduction import augmented_witness, optimal_witness

__version__ = "0.1.0"

__all__ = [
    "Arrow",
    "Config",
    "DimensionError",
    "Field",
    "FieldSizeWarning",
    "FieldTooSmallError",
    "InternalInvariantError",
    "InvalidSubrepError",
    "MatrixSpace",
    "NcrankError",
    "OracleInfeasibleError",
    "ProbabilisticFailure",
    "Quiver",
    "Representation",
    "Subrepresentation",
    "Subspace",
    "UnsupportedInstanceError",
    "ValidationError",
    "augmented_witness",
    "blow_up",
    "euler_form",
    "kernel",
    "nc_hom_ext",
    "nchom",
    "nchom_fixed_source",
    "ncext",
    "ncext_fixed_source",
    "ncrk",
    "optimal_witness",
    "pseudo_inverse",
    "rank",
    "rank_of_space",
    "rref",
    "shrunk_from_wong",
    "subrep_closure",
    "wong_sequence",
]
