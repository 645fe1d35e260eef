"""Check the analytic a priori bounds on computed profiles.

Every check is normalised to the form ``lhs <= rhs``: lower bounds on a
computed quantity put the bound on the left.  ``margin = rhs - lhs`` and a
check passes when ``lhs <= rhs * (1 + slack)``.  Envelope checks compare
logarithms, since both sides span hundreds of decades.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .profile_ode import ProfileParams, ProfileSolution, SolverConfig, eval_profile, solve_profile
from .quadrature import FunctionalValues, functionals

SLACK = 1e-8
SWEEP_A = (0.5, 1.0, 2.0)
SWEEP_MU = (0.5, 1.0, 3.0)
SWEEP_AMP = (0.1, 1.0, 10.0)


@dataclass(frozen=True)
class BoundCheck:
    name: str
    lhs: float
    rhs: float
    satisfied: bool
    margin: float

    @classmethod
    def le(cls, name, lhs, rhs, slack=SLACK):
        lhs, rhs = float(lhs), float(rhs)
        return cls(name, lhs, rhs, bool(lhs <= rhs + slack * abs(rhs)), rhs - lhs)

    @classmethod
    def log_le(cls, name, log_lhs, log_rhs, slack=SLACK):
        """``exp(log_lhs) <= exp(log_rhs) * (1 + slack)`` compared in log space.

        ``lhs``, ``rhs`` and ``margin`` are reported as logarithms.
        """
        log_lhs, log_rhs = float(log_lhs), float(log_rhs)
        return cls(name, log_lhs, log_rhs, bool(log_lhs <= log_rhs + math.log1p(slack)),
                   log_rhs - log_lhs)


@dataclass
class BoundReport:
    params: ProfileParams
    checks: list = field(default_factory=list)

    @property
    def satisfied(self) -> bool:
        return all(c.satisfied for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.satisfied]

    def record(self) -> dict:
        return {"params": asdict(self.params), "satisfied": self.satisfied,
                "checks": [asdict(c) for c in self.checks]}


def _root(p: ProfileParams) -> float:
    """``sqrt(3A / (1 + 3aA))``, the recurring factor in the bounds."""
    return math.sqrt(3.0 * p.A / (1.0 + 3.0 * p.a * p.A))


def sup_bound(p: ProfileParams) -> float:
    return p.mu * _root(p)


def half_line_mass_bound(p: ProfileParams) -> float:
    return p.A**1.5 * math.sqrt(1 + 3 * p.a * p.A) / (2 * math.sqrt(3) * p.mu)


def half_line_square_bound(p: ProfileParams) -> float:
    return p.A**2.5 * math.sqrt(1 + 3 * p.a * p.A) / (3 * math.sqrt(3) * p.mu)


def mass_bound(p: ProfileParams) -> float:
    """Whole-line lower bound on ``I``."""
    return 2 * p.A**1.5 * math.sqrt(1 + 3 * p.a * p.A) / (3 * math.sqrt(3) * p.mu)


def square_bound(p: ProfileParams) -> float:
    """Whole-line lower bound on ``Lam``."""
    return 2 * p.A**2.5 * math.sqrt(1 + 3 * p.a * p.A) / (3 * math.sqrt(3) * p.mu)


def gradient_bound(p: ProfileParams) -> float:
    """Upper bound on ``K``."""
    return 2 * math.sqrt(3 * p.A**3 * p.mu**2 / (1 + 3 * p.a * p.A))


def check_sup_bound(sol: ProfileSolution, slack: float = SLACK) -> BoundCheck:
    """``max |q'|`` over the nodes against ``mu sqrt(3A/(1+3aA))``."""
    return BoundCheck.le("sup_qp", np.max(np.abs(sol.qp)), sup_bound(sol.params), slack)


def check_integral_bounds(sol: ProfileSolution, fv: FunctionalValues, slack: float = SLACK):
    """Half-line lower bounds on the integrals of ``q`` and ``q**2``."""
    p = sol.params
    return [
        BoundCheck.le("half_line_mass_lower", half_line_mass_bound(p), fv.I / 2, slack),
        BoundCheck.le("half_line_square_lower", half_line_square_bound(p), fv.Lam / 2, slack),
    ]


def check_full_line_bounds(sol: ProfileSolution, fv: FunctionalValues, slack: float = SLACK):
    """Whole-line lower bounds on ``I``, ``Lam`` and the upper bound on ``K``."""
    p = sol.params
    return [
        BoundCheck.le("mass_lower", mass_bound(p), fv.I, slack),
        BoundCheck.le("square_lower", square_bound(p), fv.Lam, slack),
        BoundCheck.le("gradient_upper", fv.K, gradient_bound(p), slack),
    ]


def envelope_log_bounds(sol: ProfileSolution, s):
    """Logarithms of the lower and upper envelope of ``q e^{3aq}`` at ``s >= 1``."""
    p = sol.params
    s = np.asarray(s, dtype=float)
    r = _root(p)
    q1 = eval_profile(sol, 1.0).q
    base = 3 * p.mu * np.log(s) + 3 * p.mu
    lower = math.log(q1) + 3 * p.a * q1 - base - 3 * p.mu * r / s
    upper = math.log(p.A) + 3 * p.A * (1 + p.a) - base + 3 * p.mu * r / s
    return lower, upper


def check_envelope(sol: ProfileSolution, n_samples: int = 50, slack: float = SLACK):
    """Two-sided envelope of ``q e^{3aq}`` at log-spaced ``s`` in ``[1, terminal_s]``.

    The lower side is strict and the upper side is not.  Logarithms are
    compared; the slack becomes ``log1p(slack)``.
    """
    if sol.terminal_s < 1.0:
        return []
    p = sol.params
    s = np.geomspace(1.0, sol.terminal_s, n_samples)
    q = eval_profile(sol, s).q
    mid = np.log(q) + 3 * p.a * q
    lower, upper = envelope_log_bounds(sol, s)
    checks = []
    for si, lo, m, hi in zip(s, lower, mid, upper):
        checks.append(BoundCheck.log_le(f"envelope_lower@{si:.6g}", lo, m, slack))
        checks.append(BoundCheck.log_le(f"envelope_upper@{si:.6g}", m, hi, slack))
    return checks


def tail_slope_check(sol: ProfileSolution, tol: float = 0.05) -> BoundCheck:
    """``|fitted slope - (-3 mu)| <= tol * 3 mu`` over the last decade."""
    target = 3 * sol.params.mu
    return BoundCheck.le("tail_slope", abs(sol.tail_exponent - target), tol * target, 0.0)


def bound_report(sol: ProfileSolution, fv: FunctionalValues | None = None,
                 slack: float = SLACK) -> BoundReport:
    """All inequality checks for one solve."""
    fv = fv or functionals(sol)
    rep = BoundReport(sol.params)
    rep.checks.append(check_sup_bound(sol, slack))
    rep.checks.extend(check_integral_bounds(sol, fv, slack))
    rep.checks.extend(check_full_line_bounds(sol, fv, slack))
    rep.checks.extend(check_envelope(sol, slack=slack))
    rep.checks.append(tail_slope_check(sol))
    return rep


def default_sweep():
    """The 27 parameter points of the standard sweep, sorted."""
    return [ProfileParams(a, mu, A) for a, mu, A in itertools.product(SWEEP_A, SWEEP_MU, SWEEP_AMP)]


def sweep(params_list=None, cfg: SolverConfig | None = None, slack: float = SLACK):
    """Bound reports over ``params_list`` (default sweep), sorted by parameters."""
    params_list = sorted(params_list or default_sweep(), key=lambda p: (p.a, p.mu, p.A))
    return [bound_report(solve_profile(p, cfg), slack=slack) for p in params_list]


@dataclass
class LimitsReport:
    """Trends of the integrals along an increasing amplitude list."""

    a: float
    mu: float
    A: list
    I: list
    Lam: list
    K: list
    I_lower: list
    Lam_lower: list
    K_upper: list
    I_increasing: bool
    Lam_increasing: bool
    above_lower_bounds: bool
    K_below_bound_at_bottom: bool

    @property
    def satisfied(self) -> bool:
        return (self.I_increasing and self.Lam_increasing and self.above_lower_bounds
                and self.K_below_bound_at_bottom)

    def record(self) -> dict:
        return asdict(self) | {"satisfied": self.satisfied}


def check_limits(a: float, mu: float, A_list, cfg: SolverConfig | None = None,
                 slack: float = SLACK) -> LimitsReport:
    """Solve along ``A_list`` and assess the small- and large-amplitude trends.

    ``A_list`` must be ascending and span at least four decades.
    """
    A_list = [float(A) for A in A_list]
    if any(b <= a_ for a_, b in zip(A_list, A_list[1:])):
        raise ValueError("A_list must be strictly ascending")
    if A_list[-1] / A_list[0] < 1e4:
        raise ValueError("A_list must span at least four decades")
    params = [ProfileParams(a, mu, A) for A in A_list]
    fvs = [functionals(solve_profile(p, cfg)) for p in params]
    I = [fv.I for fv in fvs]
    Lam = [fv.Lam for fv in fvs]
    K = [fv.K for fv in fvs]
    I_lo = [mass_bound(p) for p in params]
    L_lo = [square_bound(p) for p in params]
    K_up = [gradient_bound(p) for p in params]
    above = all(l <= v * (1 + slack) for l, v in zip(I_lo + L_lo, I + Lam))
    return LimitsReport(
        a=a, mu=mu, A=A_list, I=I, Lam=Lam, K=K, I_lower=I_lo, Lam_lower=L_lo, K_upper=K_up,
        I_increasing=all(y > x for x, y in zip(I, I[1:])),
        Lam_increasing=all(y > x for x, y in zip(Lam, Lam[1:])),
        above_lower_bounds=above,
        K_below_bound_at_bottom=K[0] <= K_up[0] * (1 + slack),
    )
