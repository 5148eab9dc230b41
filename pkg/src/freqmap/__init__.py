"""Frequency matrices of vote distributions and the positionwise map of elections."""

from __future__ import annotations

__version__ = "0.1.0"

from .compass import CompassKind, compass_matrix, compass_paths
from .core import Election, GSTree, frequency_matrix
from .errors import (
    DimensionError,
    DomainError,
    FreqMapError,
    ParseError,
    ResourceError,
    StructureError,
    UnsupportedDimensionError,
    UnsupportedFormatError,
)
from .metric import npos, positionwise_distance
from .models import ModelSpec, model_matrix

__all__ = [
    "CompassKind",
    "DimensionError",
    "DomainError",
    "Election",
    "FreqMapError",
    "GSTree",
    "ModelSpec",
    "ParseError",
    "ResourceError",
    "StructureError",
    "UnsupportedDimensionError",
    "UnsupportedFormatError",
    "compass_matrix",
    "compass_paths",
    "frequency_matrix",
    "model_matrix",
    "npos",
    "positionwise_distance",
    "__version__",
]
