"""Exception types shared across the package."""

__all__ = ["DomainError"]


class DomainError(ValueError):
    """Input is outside the mathematical domain of an operation."""
