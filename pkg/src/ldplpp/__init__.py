"""Exact and asymptotic tail probabilities for geometric last-passage percolation."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AccuracyError,
    AccuracyWarning,
    BracketError,
    CapacityError,
    DomainError,
    LdplppError,
    RegimeError,
    ValidationError,
)

__all__ = [
    "__version__",
    "AccuracyError",
    "AccuracyWarning",
    "BracketError",
    "CapacityError",
    "DomainError",
    "LdplppError",
    "RegimeError",
    "ValidationError",
]
