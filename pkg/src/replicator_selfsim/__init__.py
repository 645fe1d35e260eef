"""Self-similar solutions of a nonlocal replicator equation on the line.

Typical use::

    from replicator_selfsim import calibrate, SimilaritySolution, eval_u

    res = calibrate(a=1.0, beta=1.0)
    sim = SimilaritySolution.from_calibration(res)
    eval_u(sim, t=2.0, x=0.5)
"""

from .bounds_checker import (
    BoundCheck,
    BoundReport,
    bound_report,
    check_envelope,
    check_integral_bounds,
    check_limits,
    check_sup_bound,
)
from .calibration import CalibrationResult, Q_of_A, calibrate
from .errors import (
    BracketFailure,
    NegativityError,
    NoConvergence,
    NonIntegrableTail,
    NonPositiveEncountered,
    NumericalError,
    OutOfRange,
    SelfSimError,
    StabilityViolation,
    StepLimitExceeded,
    ValidationError,
)
from .pde_evolver import (
    Grid,
    PdeState,
    evolve,
    inner_Au_u,
    nonlocal_terms,
    similarity_state,
    step,
    suggest_dt,
    validate_against_similarity,
)
from .profile_ode import (
    ProfileParams,
    ProfileSolution,
    SolverConfig,
    TerminationReason,
    eval_profile,
    rhs,
    solve_profile,
)
from .quadrature import FunctionalValues, functionals, identity_residual
from .similarity import (
    Exponents,
    SimilaritySolution,
    delta_diagnostics,
    derive_exponents,
    eval_u,
    mass,
)

__all__ = [name for name in dir() if not name.startswith("_")]
