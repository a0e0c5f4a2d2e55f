"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
NumericalError -> 4.
"""


class NoisimrlError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(NoisimrlError):
    """Invalid or inconsistent configuration."""


class DataError(NoisimrlError):
    """Malformed persisted data or invariant-violating values."""


class NumericalError(NoisimrlError):
    """Numerical failure (non-convergent fit, NaN in an update, ...)."""
