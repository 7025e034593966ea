"""Exceptions raised by qharness.

The CLI maps them onto exit codes: domain problems exit with 2, numerical
failures with 3.
"""


class QHarnessError(Exception):
    """Base class for all qharness errors."""


class DomainError(QHarnessError, ValueError):
    """An argument lies outside the domain of the operation."""


class UnsupportedModeError(DomainError):
    """A closed form is requested for a value of q where it is not defined."""


class NumericalError(QHarnessError, ArithmeticError):
    """A numerical routine failed (e.g. the eigen-solver did not converge)."""

    def __init__(self, message: str, dump: str = ""):
        super().__init__(message if not dump else f"{message}\n{dump}")
        self.dump = dump


class InconsistencyError(QHarnessError, ArithmeticError):
    """A state that admissible parameters should make impossible."""
