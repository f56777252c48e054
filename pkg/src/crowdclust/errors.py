"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid user-supplied data (bad labels, malformed documents, ...)."""


class UndefinedMetricError(InputError):
    """A comparison index is undefined for the given inputs (e.g. fewer than
    two objects, so no object pairs exist)."""
