"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: ``ParameterError`` -> 3,
``BudgetExhausted`` (and subclasses) -> 4.
"""


class QIError(Exception):
    """Base class for all errors raised by :mod:`qidual`."""


class ParameterError(QIError, ValueError):
    """An argument is outside the documented domain."""


class BudgetExhausted(QIError):
    """A search, enumeration or integration ran out of its evaluation budget."""


class QuadratureNonConvergence(BudgetExhausted):
    """Adaptive quadrature could not reach the requested tolerance."""


class SpecTooShort(BudgetExhausted):
    """A generator spec does not cover the coordinates a target needs."""

    def __init__(self, message, deficit=None):
        super().__init__(message)
        self.deficit = deficit


class NotInQError(ParameterError):
    """A point of the circle is not of finite order at the available depth."""
