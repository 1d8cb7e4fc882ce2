"""Exception types shared across the package."""


class SwarmSelectError(Exception):
    """Base class for all package errors."""


class DataError(SwarmSelectError):
    """Raised for malformed, missing, or degenerate input data."""


class UndefinedStatisticError(SwarmSelectError):
    """Raised when a statistic has no defined value (e.g. constant input)."""
