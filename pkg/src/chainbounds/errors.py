"""Exception types shared across the package."""


class ChainBoundsError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ChainBoundsError, ValueError):
    """An argument is outside the domain an operation accepts."""


class NumericalError(ChainBoundsError, ArithmeticError):
    """A solver failed to bracket or converge, or produced contradictory values."""
