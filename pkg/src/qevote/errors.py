"""Exception types shared across the package.

Everything raised on purpose derives from QevoteError so callers can
catch simulator failures without swallowing genuine bugs (those surface
as InternalError or plain Python exceptions).
"""


class QevoteError(Exception):
    """Base class for all deliberate failures."""


class ParameterError(QevoteError):
    """A protocol or experiment parameter is out of its legal domain."""


class DomainError(QevoteError):
    """A numeric argument lies outside the function's domain."""


class CapacityError(QevoteError):
    """A requested state register would exceed the amplitude budget."""


class UnitarityError(QevoteError):
    """A matrix handed to apply_unitary is not unitary within tolerance."""


class ProtocolOrderError(QevoteError):
    """A protocol step was invoked out of phase order."""


class ProtocolAbort(QevoteError):
    """A protocol participant aborted; carries who and why."""

    def __init__(self, reason: str, voter: int | None = None):
        super().__init__(reason if voter is None else f"{reason} (voter {voter})")
        self.reason = reason
        self.voter = voter


class QuadratureError(QevoteError):
    """Adaptive quadrature failed to converge within its budget."""


class EstimatorOverflow(QevoteError):
    """More than two histogram bins crossed the decision threshold."""


class EstimatorEmpty(QevoteError):
    """No histogram bin crossed the decision threshold."""


class DegenerateSample(QevoteError):
    """An advantage estimate was requested from an all-excluded sample."""


class ConfigError(QevoteError):
    """A run configuration is malformed or inconsistent."""


class InternalError(QevoteError):
    """An internal invariant was violated; indicates a bug."""
