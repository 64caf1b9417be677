"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: model/validation problems
exit 2, I/O problems exit 3, and resource-limit problems exit 4.
"""

from __future__ import annotations


class ModelError(ValueError):
    """A model document or scenario failed validation."""


class OrderConflictError(ModelError):
    """A requested variable order contradicts the scenario's temporal order.

    Carries the first offending pair so callers can report it.
    """

    def __init__(self, earlier: str, later: str, message: str | None = None):
        self.earlier = earlier
        self.later = later
        super().__init__(
            message
            or f"order conflict: {earlier!r} must come before {later!r}"
        )


class ResourceLimitError(RuntimeError):
    """A configured enumeration or expansion limit would be exceeded."""

    def __init__(self, message: str, count: int | None = None):
        self.count = count
        super().__init__(message)
