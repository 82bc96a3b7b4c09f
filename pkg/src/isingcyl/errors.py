"""Exception types shared across the package."""


class ValidationError(ValueError):
    """A precondition on user-supplied parameters was violated."""


class ResourceLimitError(RuntimeError):
    """A computation would exceed a configured resource cap."""
