"""Exception types shared across the package."""


class DualFieldError(Exception):
    """Base class for every error raised by this package."""


class LabelDomainError(DualFieldError, ValueError):
    """A label does not belong to the dual it was used with."""


class CapabilityError(DualFieldError, ValueError):
    """The requested operation is not implemented for this dual or measure."""


class DataIntegrityError(DualFieldError, ValueError):
    """Structural data (character tables, recovered multiplicities) failed validation."""


class SchemaError(DataIntegrityError):
    """A finite-group data document does not match the expected JSON layout."""


class NotPositiveDefiniteError(DualFieldError, ValueError):
    """Inversion produced a genuinely negative class weight.

    Carries the signed weights so callers can inspect how far from
    positivity the input was.
    """

    def __init__(self, message: str, weights):
        super().__init__(message)
        self.weights = tuple(weights)


class IncompleteCovarianceError(DualFieldError, ValueError):
    """A covariance table is missing required irreducible labels."""

    def __init__(self, message: str, missing):
        super().__init__(message)
        self.missing = tuple(missing)
