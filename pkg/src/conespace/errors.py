"""Exception hierarchy shared by every module."""


class ConespaceError(Exception):
    """Base class for all errors raised by conespace."""


class ValidationError(ConespaceError, ValueError):
    """Bad arguments: wrong dimension, weights outside the admissible set, etc."""


class DomainError(ValidationError):
    """A quantity was requested outside the range where it is defined."""


class ConsistencyError(ConespaceError, ArithmeticError):
    """A numerical consistency check failed (e.g. a cosh argument below 1)."""


class QuadratureError(ConsistencyError):
    """Numerical integration or root finding did not converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NumericWarning(RuntimeWarning):
    """Emitted when a finite-difference estimate looks unreliable."""
