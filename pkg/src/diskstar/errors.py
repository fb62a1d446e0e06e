"""Shared exception types."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class SingularPointError(DomainError):
    """Evaluation requested exactly on a singular set (e.g. |varpi| = 1)."""


class GridMismatchError(ValueError):
    """Two grid functions do not share a compatible grid."""


class DecayError(RuntimeError):
    """Sampled function does not decay at the grid boundary as required."""


class ExtrapolationError(RuntimeError):
    """Interpolation target lies outside the source grid."""


class TruncationError(RuntimeError):
    """Estimated tail of a truncated improper integral exceeds tolerance."""
