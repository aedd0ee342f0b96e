"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, DataError -> 2,
NumericError -> 3.
"""


class MopError(Exception):
    """Base class for all package errors."""


class ConfigError(MopError):
    """Invalid configuration, parameters, or usage."""


class DataError(MopError):
    """Bad or missing input data."""


class ParseError(DataError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class NumericError(MopError):
    """Non-finite values or other numeric failures."""


class BalanceInfeasibleError(MopError):
    """No assignment can satisfy the balance constraint."""
