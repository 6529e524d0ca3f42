"""Exception types shared across the package."""

from __future__ import annotations


class BoldcalError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(BoldcalError, ValueError):
    """A parameter is outside its mathematical domain (e.g. delta <= 0)."""


class NonInvertibleError(ParameterError):
    """The requested recalibration map has no inverse (gamma == 0)."""


class DivergenceError(BoldcalError, RuntimeError):
    """The likelihood is unbounded or the optimizer ran off to the clamp rails."""


class NonConvergenceError(BoldcalError, RuntimeError):
    """The optimizer hit its iteration cap without converging.

    Carries the best fit found so far in ``best_fit``.
    """

    def __init__(self, message: str, best_fit=None):
        super().__init__(message)
        self.best_fit = best_fit


class InternalConsistencyError(BoldcalError, RuntimeError):
    """A quantity violated an identity it must satisfy (optimizer failure)."""


class UndefinedMetricError(BoldcalError, ValueError):
    """A metric is undefined for the given data (e.g. AUC with one class)."""


class DataFormatError(BoldcalError, ValueError):
    """Input data could not be parsed. ``row`` is 1-based (header is row 1)."""

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row
