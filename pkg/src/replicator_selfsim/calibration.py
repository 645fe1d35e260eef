"""Choose the amplitude ``A`` that turns the auxiliary profile into a density.

With ``mu = beta + 1/3`` the integral identity gives
``Q(A) := K + (a/2) Lam = beta * I(A)``, so ``Q(A) = beta`` forces
``I(A) = 1``.  :func:`calibrate` brackets the root by doubling or halving
from ``A = 1`` and refines it with a safeguarded secant iteration on
``ln Q - ln beta`` as a function of ``ln A``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BracketFailure, NoConvergence, NumericalError, ValidationError
from .profile_ode import ProfileParams, ProfileSolution, SolverConfig, solve_profile
from .quadrature import FunctionalValues, functionals

MAX_EXPANSIONS = 60
MAX_ITER = 100
MASS_TOL = 1e-6


@dataclass(frozen=True)
class CalibrationResult:
    """Outcome of :func:`calibrate`.

    ``bracket`` is the final ``(lo, hi)`` enclosing ``A_beta``; together with
    the inputs it makes the run reproducible.
    """

    a: float
    beta: float
    A_beta: float
    Q_at_A: float
    mass: float
    iterations: int
    bracket: tuple[float, float]
    profile: ProfileSolution
    functionals: FunctionalValues
    tol: float

    def record(self) -> dict:
        return {
            "a": self.a,
            "beta": self.beta,
            "mu": self.profile.params.mu,
            "A_beta": self.A_beta,
            "Q_at_A": self.Q_at_A,
            "mass": self.mass,
            "iterations": self.iterations,
            "bracket": list(self.bracket),
            "tol": self.tol,
            "functionals": self.functionals.record(),
            "profile": self.profile.record(),
        }


def _mu(beta: float) -> float:
    return beta + 1.0 / 3.0


def _check_positive(**kw):
    for name, v in kw.items():
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            raise ValidationError(f"{name} must be a positive finite number, got {v!r}")


def _evaluate(a, beta, A, cfg):
    sol = solve_profile(ProfileParams(a, _mu(beta), A), cfg)
    fv = functionals(sol)
    return fv.K + 0.5 * a * fv.Lam, sol, fv


def Q_of_A(a: float, beta: float, A: float, cfg: SolverConfig | None = None) -> float:
    """``K + (a/2) Lam`` of the auxiliary profile with ``mu = beta + 1/3``."""
    _check_positive(a=a, beta=beta, A=A)
    return _evaluate(a, beta, A, cfg or SolverConfig())[0]


def calibrate(
    a: float,
    beta: float,
    cfg: SolverConfig | None = None,
    tol: float = 1e-8,
    mass_tol: float = MASS_TOL,
) -> CalibrationResult:
    """Find ``A_beta`` with ``|Q(A_beta) - beta| / beta <= tol``.

    Raises:
        BracketFailure: no sign change within ``MAX_EXPANSIONS`` doublings or
            halvings.
        NoConvergence: refinement did not meet ``tol`` in ``MAX_ITER`` steps.
        NumericalError: the converged profile has ``|mass - 1| > mass_tol``.
    """
    _check_positive(a=a, beta=beta, tol=tol)
    cfg = cfg or SolverConfig()
    log_beta = math.log(beta)
    cache = {}

    def f(x):
        # x = ln A; returns ln Q - ln beta
        if x not in cache:
            Q, sol, fv = _evaluate(a, beta, math.exp(x), cfg)
            cache[x] = (math.log(Q) - log_beta, Q, sol, fv)
        return cache[x]

    def done(x):
        _, Q, sol, fv = cache[x]
        result = CalibrationResult(
            a=a, beta=beta, A_beta=math.exp(x), Q_at_A=Q, mass=fv.I,
            iterations=iterations, bracket=(math.exp(lo), math.exp(hi)),
            profile=sol, functionals=fv, tol=tol,
        )
        check_mass(result, mass_tol)
        return result

    def converged(x):
        return abs(cache[x][1] - beta) / beta <= tol

    iterations = 0
    x0 = 0.0
    f0 = f(x0)[0]
    step = -math.log(2.0) if f0 > 0 else math.log(2.0)
    lo = hi = x0
    flo = fhi = f0
    for _ in range(MAX_EXPANSIONS):
        if converged(hi if step > 0 else lo):
            break
        x_new = (hi if step > 0 else lo) + step
        f_new = f(x_new)[0]
        if step > 0:
            lo, flo, hi, fhi = hi, fhi, x_new, f_new
        else:
            hi, fhi, lo, flo = lo, flo, x_new, f_new
        if (flo < 0) != (fhi < 0) or flo == 0 or fhi == 0:
            break
    else:
        raise BracketFailure(f"no sign change of Q - beta for A in [{math.exp(lo)}, {math.exp(hi)}]")

    for x in (lo, hi):
        if converged(x):
            # a bracket end already meets the target; widen so lo < A < hi
            span = max(hi - lo, math.log(2.0))
            lo, hi = x - span, x + span
            return done(x)
    if (flo < 0) == (fhi < 0):
        raise BracketFailure(f"no sign change of Q - beta for A in [{math.exp(lo)}, {math.exp(hi)}]")

    # Illinois-modified regula falsi with a bisection fallback
    side = 0
    while iterations < MAX_ITER:
        iterations += 1
        x = (lo * fhi - hi * flo) / (fhi - flo)
        if not lo < x < hi:
            x = 0.5 * (lo + hi)
        fx = f(x)[0]
        if converged(x):
            return done(x)
        if (fx < 0) == (flo < 0):
            lo, flo = x, fx
            if side == -1:
                fhi *= 0.5
            side = -1
        else:
            hi, fhi = x, fx
            if side == 1:
                flo *= 0.5
            side = 1
        if hi - lo <= 4 * math.ulp(max(abs(lo), abs(hi), 1.0)):
            break
    raise NoConvergence(
        f"|Q - beta|/beta did not reach {tol} after {iterations} refinement steps; "
        f"bracket A in [{math.exp(lo)}, {math.exp(hi)}]"
    )


def check_mass(result: CalibrationResult, mass_tol: float = MASS_TOL) -> None:
    """Raise :class:`NumericalError` if the calibrated profile is not unit mass."""
    if abs(result.mass - 1.0) > mass_tol:
        raise NumericalError(f"calibrated mass {result.mass} differs from 1 by more than {mass_tol}")
