"""Exception types shared across the package."""


class StargenError(Exception):
    """Base class for all package errors."""


class ConfigurationError(StargenError, ValueError):
    """A grid, window or run configuration violates a precondition."""


class GridMismatchError(StargenError, ValueError):
    """Two operands live on different grids."""


class DomainError(StargenError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class UnsupportedError(StargenError, NotImplementedError):
    """The requested configuration is outside what the operation handles."""


class NumericalContractError(StargenError, RuntimeError):
    """A numerical postcondition (hermiticity, normalization, ...) failed."""


class WindowAnnihilationError(StargenError, ArithmeticError):
    """The adjoint transform with the chosen window maps the field to zero."""
