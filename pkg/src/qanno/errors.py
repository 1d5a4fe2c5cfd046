"""Exception types shared across the package."""


class DataError(Exception):
    """Malformed or inconsistent input data (bad record, unknown id, corrupt file)."""


class InsufficientRatersError(DataError):
    """Every question was excluded from an agreement statistic (fewer than 2 raters each)."""
