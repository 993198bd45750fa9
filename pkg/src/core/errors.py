"""Error hierarchy shared by every degma module."""

from typing import Any, Dict, Optional


class DegmaError(Exception):
    """Base error carrying a stable machine-readable code.

    Args:
        message: Human readable description
        details: Optional structured context written into error reports
    """

    code = "degma-error"
    exit_code = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Return the error as a JSON-ready dictionary."""
        return {
            "error": self.code,
            "exit_code": self.exit_code,
            "message": self.message,
            "details": self.details,
        }


class ConfigurationError(DegmaError):
    """Invalid grid or solver configuration."""

    code = "configuration"
    exit_code = 2


class UnsupportedOrderError(DegmaError):
    """Derivative order beyond what the selected stencil supports."""

    code = "unsupported-order"
    exit_code = 3


class DomainError(DegmaError):
    """Input outside the mathematical domain of an operation."""

    code = "domain"
    exit_code = 4


class PreconditionError(DegmaError):
    """A documented precondition does not hold."""

    code = "precondition"
    exit_code = 5


class ConvexityError(DegmaError):
    """Discrete convexity lost and damping exhausted."""

    code = "convexity-failure"
    exit_code = 6


class NegativityError(DegmaError):
    """Solution became non-negative at an interior node."""

    code = "negativity-failure"
    exit_code = 7


class NonConvergenceError(DegmaError):
    """Iteration budget exhausted or iteration stagnated."""

    code = "non-convergence"
    exit_code = 8


class StiffnessError(DegmaError):
    """Flow time step underflow."""

    code = "stiffness"
    exit_code = 9


class OracleError(DegmaError):
    """Radial shooting could not bracket a solution."""

    code = "oracle"
    exit_code = 10


class SolverError(DegmaError):
    """Linear solver breakdown (degenerate pivots)."""

    code = "solver"
    exit_code = 11


class FrameError(DegmaError):
    """Boundary frame hypotheses violated."""

    code = "frame"
    exit_code = 12


class PatchRadiusError(DegmaError):
    """Hodograph root left the patch; delta too large."""

    code = "delta-too-large"
    exit_code = 13


class RangeError(DegmaError):
    """Requested conjugate range not covered by the slice slopes."""

    code = "range"
    exit_code = 14


class SignError(DegmaError):
    """Normal derivative has the wrong sign."""

    code = "sign"
    exit_code = 15


class ConditioningError(DegmaError):
    """Chebyshev coefficients do not decay."""

    code = "conditioning"
    exit_code = 16


class InsufficientDataError(DegmaError):
    """Too few usable coefficients for an estimate."""

    code = "insufficient-data"
    exit_code = 17


class DifferentiationError(DegmaError):
    """Numerical differentiation produced non-finite values."""

    code = "differentiation"
    exit_code = 18


class WindowError(DegmaError):
    """Fit window too large for the asymptotic regime."""

    code = "window-too-large"
    exit_code = 19


class InputError(DegmaError):
    """Missing or unreadable input file."""

    code = "missing-input"
    exit_code = 20


class UnknownCommandError(DegmaError):
    """Subcommand not recognised."""

    code = "unknown-subcommand"
    exit_code = 21


class FlagError(DegmaError):
    """Invalid combination of command line flags."""

    code = "invalid-flags"
    exit_code = 22


class PersistenceError(DegmaError):
    """Output or input file could not be written or read."""

    code = "persistence"
    exit_code = 23
