"""Exception types shared across the package.

Each class maps to one CLI exit code, see :mod:`synthprune.cli`.
"""


class SynthPruneError(Exception):
    """Base class for all package errors."""


class ConfigError(SynthPruneError, ValueError):
    """An experiment parameter is missing, malformed or out of range.

    Parameters
    ----------
    message : str
        Human readable description.
    field : str, optional
        Name of the offending field, repeated in the message.
    """

    def __init__(self, message: str, field: str | None = None):
        if field is not None and field not in message:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field


class InvalidRegimeError(SynthPruneError, ArithmeticError):
    """The asymptotic formulas leave their domain of validity (h <= 0, negative variance...)."""


class ConvergenceError(SynthPruneError, ArithmeticError):
    """A fixed-point iteration did not reach its tolerance."""

    def __init__(self, message: str, residual: float = float("nan"), iterations: int = 0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class DataError(SynthPruneError, ValueError):
    """Input data is malformed (ragged CSV, wrong label set, too few rows)."""
