"""Exact workbench for the S3-symmetric tridiagonal algebra on cycle graphs."""

from .errors import ConjectureViolation, ConsistencyError, DistanceRegularityError, \
    RelationFailure
from .exactfield import get_field
from .fundament import FundamentalModule, build_fundamental, transition_matrix
from .orbits import canonicalize, enumerate_orbits
from .scheme import CycleScheme, tridiagonal_scalars
from .tensorops import TensorVector, apply, verify_s3_relations
from .verify import full_report, terwilliger_dimension

__version__ = "0.1.0"

__all__ = [
    "ConjectureViolation", "ConsistencyError", "CycleScheme", "DistanceRegularityError",
    "FundamentalModule", "RelationFailure", "TensorVector", "apply", "build_fundamental",
    "canonicalize", "enumerate_orbits", "full_report", "get_field", "terwilliger_dimension",
    "transition_matrix", "tridiagonal_scalars", "verify_s3_relations",
]
