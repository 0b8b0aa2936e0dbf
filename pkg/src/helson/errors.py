"""Exception types shared across the package."""

from helson.index import IndexOverflowError, IndexRangeError


class DivergenceError(ArithmeticError):
    """A series or integral that defines the requested value diverges."""


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


class ContractError(ValueError):
    """Input violates a documented precondition."""


class UnsupportedInputError(ValueError):
    """Input is well formed but outside what the routine can decide."""


class NumericalError(ArithmeticError):
    """An iterative method failed to reach its tolerance."""


__all__ = [
    "ContractError",
    "DivergenceError",
    "DomainError",
    "IndexOverflowError",
    "IndexRangeError",
    "NumericalError",
    "UnsupportedInputError",
]
