"""Exception types raised across the package."""


class NonclassicalError(Exception):
    """Base class for all package errors."""


class DimensionError(NonclassicalError, ValueError):
    """A level index or matrix shape does not fit the truncation."""


class TruncationError(NonclassicalError, ValueError):
    """The requested truncation would discard non-negligible probability mass."""


class ValidationError(NonclassicalError, ValueError):
    """Input fails a structural check (Hermiticity, trace, positivity)."""


class NotPSDError(ValidationError):
    """Matrix has an eigenvalue below the hard negativity threshold."""


class ZeroTemperatureError(NonclassicalError, ValueError):
    """A finite-temperature formula was called with N = 0."""


class CapacityError(NonclassicalError, ValueError):
    """Level indices exceed the supported extended-precision budget."""


class IntegrationError(NonclassicalError, RuntimeError):
    """The adaptive ODE integrator failed."""


class ExtentError(NonclassicalError, ValueError):
    """The phase-space grid does not cover the Wigner function."""


class QuadratureError(NonclassicalError, RuntimeError):
    """Grid refinement did not converge."""


class TruncationWarning(UserWarning):
    """Propagation lost probability mass past the working truncation."""
