"""Exception types shared across the package."""


class Kg5dError(Exception):
    """Base class for all package errors."""


class ConfigurationError(Kg5dError):
    """Invalid run configuration: bad flags, bad config keys, unusable parameters."""


class BracketingError(Kg5dError):
    """Root bracket does not contain a sign change."""


class NonConvergenceError(Kg5dError):
    """An iterative scheme ran out of budget.

    Carries the best estimate produced so far and a bound on its error so
    callers can decide whether the partial result is still usable.
    """

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class QuadratureError(NonConvergenceError):
    """Adaptive quadrature exceeded its subdivision budget."""


class GridSizeError(Kg5dError):
    """A sampled field is too small for the requested stencil."""


class DomainError(Kg5dError):
    """Input outside the mathematical domain of an operation."""


class GaugeError(Kg5dError):
    """Electromagnetic potential does not satisfy the required gauge condition."""


class TurningPointError(DomainError):
    """Asymptotic evaluation requested inside the excluded turning-point band."""


class LaguerreOverflowError(Kg5dError):
    """Laguerre recurrence left the representable floating-point range."""

    def __init__(self, n, x, message=None):
        self.n = n
        self.x = x
        super().__init__(message or f"Laguerre recurrence overflowed at n={n}, x={x}")


class VerificationFailure(Kg5dError):
    """A verification command found residuals above its configured tolerance."""
