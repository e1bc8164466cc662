"""Exception hierarchy shared by all modules."""


class FilamentError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(FilamentError, ValueError):
    """Input violates a documented precondition."""


class NonFiniteError(ValidationError):
    """Input contains NaN or Inf."""


class NumericalError(FilamentError, ArithmeticError):
    """A numerical procedure could not reach the requested accuracy."""


class DegenerateSurfaceError(NumericalError):
    """Spectral surface is degenerate (colliding branch points or zeros)."""
