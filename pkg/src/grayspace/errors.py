"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: configuration problems exit 2, data
problems exit 3, anything else exits 4.
"""


class GrayspaceError(Exception):
    """Base class for all package-specific errors."""


class DomainError(GrayspaceError, ValueError):
    """A numeric argument is outside the function's domain (non-finite,
    non-positive, wrong sign, ...)."""


class ConfigError(GrayspaceError):
    """A run configuration is malformed or internally inconsistent."""


class DataError(GrayspaceError):
    """Input data (grid files, records) is malformed or inconsistent."""
