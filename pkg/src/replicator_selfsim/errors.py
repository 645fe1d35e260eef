"""Exception hierarchy shared by the solver modules.

Two families exist so callers (notably the CLI) can tell bad input from
numerical trouble: :class:`ValidationError` for parameters outside the
admissible range, :class:`NumericalError` for everything that goes wrong
while computing.
"""


class SelfSimError(Exception):
    """Base class for all package errors."""


class ValidationError(SelfSimError, ValueError):
    """Input parameters violate a documented constraint."""


class NumericalError(SelfSimError, ArithmeticError):
    """A computation failed or produced an inadmissible result."""


class NonPositiveEncountered(NumericalError):
    """The profile left the positive region (tolerances too loose)."""


class StepLimitExceeded(NumericalError):
    """The integrator used its whole step budget before terminating."""


class NonIntegrableTail(NumericalError):
    """The fitted tail decays too slowly for the integrals to converge."""


class BracketFailure(NumericalError):
    """Bracket expansion did not straddle the calibration target."""


class NoConvergence(NumericalError):
    """Root refinement ran out of iterations."""


class StabilityViolation(NumericalError):
    """A PDE step produced non-finite values."""


class NegativityError(NumericalError):
    """A PDE step undershot below the roundoff threshold."""


class OutOfRange(SelfSimError, ValueError):
    """Evaluation requested outside the solved interval."""
