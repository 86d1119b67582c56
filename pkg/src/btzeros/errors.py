"""Exception types shared across the library."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RegimeError(ValueError):
    """An off-zero-set quantity was requested on (or too close to) the zero set."""


class NumericError(ArithmeticError):
    """A numerical routine failed to reach its accuracy target."""
