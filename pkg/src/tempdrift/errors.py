"""Exception hierarchy shared across the toolkit.

The split mirrors the CLI exit codes: ConfigError -> 2, DataError -> 3,
DegenerateDataError -> 4.
"""


class TempdriftError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(TempdriftError):
    """Invalid or incomplete run configuration."""


class DataError(TempdriftError):
    """Malformed input files or violated data invariants."""


class DegenerateDataError(TempdriftError):
    """Numerically undefined situation (zero variance, zero vectors, 0/0)."""
