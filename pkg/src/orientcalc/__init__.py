"""Exact arithmetic for orientations of determinant line bundles of elliptic operator families."""

from .errors import (
    AdmissibilityError,
    IncompleteDataError,
    InconsistencyError,
    InternalConsistencyError,
    NonConformingError,
    OrientCalcError,
    PurityError,
    RangeError,
    ShapeError,
    UnsupportedModelError,
)

__version__ = "0.1.0"
