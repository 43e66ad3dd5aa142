"""Qudit e-voting protocol simulator and security-bound verifier."""

__version__ = "0.1.0"

from .errors import (
    CapacityError,
    ConfigError,
    DegenerateSample,
    DomainError,
    EstimatorEmpty,
    EstimatorOverflow,
    InternalError,
    ParameterError,
    ProtocolAbort,
    ProtocolOrderError,
    QevoteError,
    QuadratureError,
    UnitarityError,
)
from .rng import Rng

__all__ = [
    "CapacityError",
    "ConfigError",
    "DegenerateSample",
    "DomainError",
    "EstimatorEmpty",
    "EstimatorOverflow",
    "InternalError",
    "ParameterError",
    "ProtocolAbort",
    "ProtocolOrderError",
    "QevoteError",
    "QuadratureError",
    "Rng",
    "UnitarityError",
    "__version__",
]
