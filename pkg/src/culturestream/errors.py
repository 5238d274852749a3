"""Exception types shared across the package."""


class ConfigError(Exception):
    """Bad or missing configuration (paths, parameter ranges, flag values)."""


class DataError(Exception):
    """Input data violates a hard contract (e.g. conflicting roster rows)."""
