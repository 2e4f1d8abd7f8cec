class DomainError(ValueError):
    """An argument lies outside the domain of the requested function."""


class ConvergenceError(RuntimeError):
    """A quadrature or acceleration scheme did not reach its tolerance."""


class PrecisionError(ValueError):
    """The request exceeds the precision of a stored constant table."""
