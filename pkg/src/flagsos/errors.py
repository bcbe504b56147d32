"""Exception taxonomy shared across the package.

Exit codes used by the CLI: verification failures map to 2, infeasible
problems to 3, and exceeded enumeration/solver budgets to 4.
"""


class FlagSosError(Exception):
    """Base class for all package errors."""


class BudgetError(FlagSosError):
    """An enumeration or solver size budget was exceeded."""

    exit_code = 4


class VerificationError(FlagSosError):
    """An exact check failed; carries a witness when one exists."""

    exit_code = 2

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InfeasibleError(FlagSosError):
    """The SDP (or its exact linear restriction) has no solution."""

    exit_code = 3


class RoundingError(FlagSosError):
    """No nearby rational PSD solution within the denominator bound."""

    exit_code = 2

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
