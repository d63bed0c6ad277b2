"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when arguments violate an operation's preconditions."""


class NumericalFailure(ArithmeticError):
    """Raised when a factorization or solve cannot produce a trustworthy result."""


class DegradedAccuracyWarning(UserWarning):
    """Issued when a result is usable but known to be less accurate than requested."""
