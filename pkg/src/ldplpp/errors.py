"""Exception types shared across the package.

Each class carries the CLI exit code used by ``ldplpp`` when the error
escapes a subcommand.
"""


class LdplppError(Exception):
    exit_code = 1


class ValidationError(LdplppError, ValueError):
    """Malformed user input (bad rational, q2 outside (0,1), trials < 1...)."""

    exit_code = 2


class DomainError(LdplppError, ValueError):
    """Argument outside the mathematical domain of a function."""

    exit_code = 2


class RegimeError(DomainError):
    """Parameters on the wrong side of a phase boundary for the requested expansion."""

    exit_code = 3


class AccuracyError(LdplppError, ArithmeticError):
    """Requested accuracy not reached; ``best`` holds the best available estimate."""

    exit_code = 4

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class CapacityError(LdplppError):
    """Exact route would exceed its size cap."""

    exit_code = 2


class BracketError(DomainError):
    """Root bracket without a sign change."""


class AccuracyWarning(UserWarning):
    pass
