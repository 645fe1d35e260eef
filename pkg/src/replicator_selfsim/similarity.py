"""Self-similar solution ``u(t, x) = t**(-kappa) g(x t**(-lambda))``.

The exponents follow from requiring that substituting the ansatz into the
evolution equation (with drift weight ``t**gamma``) leaves no explicit time
dependence.  That yields four linear conditions on ``(gamma, kappa, lambda)``,
solved here in exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .calibration import CalibrationResult
from .errors import ValidationError
from .profile_ode import ProfileSolution, eval_profile
from .quadrature import _GAUSS_T, _GAUSS_W

# Rows act on (gamma, kappa, lambda); each row must equal the right-hand side.
# Balances: u_t vs u u_xx, vs u x u_x t^gamma, vs u * int u_x^2, vs u t^gamma int u^2.
SCALING_MATRIX = ((0, -1, -2), (1, -1, 0), (0, -2, -1), (1, -2, 1))
SCALING_RHS = (-1, -1, -1, -1)


@dataclass(frozen=True)
class Exponents:
    gamma: Fraction
    kappa: Fraction
    lam: Fraction

    def residuals(self) -> tuple[Fraction, ...]:
        """Left minus right side of every scaling condition."""
        x = (self.gamma, self.kappa, self.lam)
        return tuple(
            sum(c * v for c, v in zip(row, x)) - r for row, r in zip(SCALING_MATRIX, SCALING_RHS)
        )

    def as_floats(self) -> tuple[float, float, float]:
        return float(self.gamma), float(self.kappa), float(self.lam)


def _solve_exact(m, b):
    """Gauss-Jordan elimination over the rationals for a square system."""
    n = len(m)
    aug = [[Fraction(v) for v in row] + [Fraction(r)] for row, r in zip(m, b)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col] / aug[col][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [aug[i][n] / aug[i][i] for i in range(n)]


def derive_exponents() -> Exponents:
    """Solve the overdetermined scaling system exactly.

    The normal equations give the least-squares solution; the system is
    consistent, so every residual must vanish.
    """
    m = [[Fraction(v) for v in row] for row in SCALING_MATRIX]
    b = [Fraction(v) for v in SCALING_RHS]
    mtm = [[sum(m[k][i] * m[k][j] for k in range(len(m))) for j in range(3)] for i in range(3)]
    mtb = [sum(m[k][i] * b[k] for k in range(len(m))) for i in range(3)]
    exps = Exponents(*_solve_exact(mtm, mtb))
    if any(exps.residuals()):
        raise ArithmeticError(f"scaling system is inconsistent: residuals {exps.residuals()}")
    return exps


@dataclass(frozen=True)
class SimilaritySolution:
    """A calibrated profile together with the similarity exponents."""

    exponents: Exponents
    g: ProfileSolution
    a: float
    beta: float

    @classmethod
    def from_calibration(cls, result: CalibrationResult) -> "SimilaritySolution":
        return cls(derive_exponents(), result.profile, result.a, result.beta)

    @property
    def A_beta(self) -> float:
        return float(self.g.q[0])


def _check_time(t):
    if not (np.isfinite(t) and t > 0):
        raise ValidationError(f"t must be positive and finite, got {t}")


def eval_u(sol: SimilaritySolution, t: float, x):
    """``t**(-1/3) g(x t**(-1/3))``; the profile tail is extrapolated if needed."""
    _check_time(t)
    scale = float(t) ** (-1.0 / 3.0)
    val = eval_profile(sol.g, np.asarray(x, dtype=float) * scale, extrapolate=True)
    return scale * val.q


def mass(sol: SimilaritySolution, t: float) -> float:
    """Integral of ``u(t, .)`` over the line, evaluated through :func:`eval_u`.

    The node intervals of ``g`` are mapped to ``x = t**(1/3) s`` and each is
    integrated with 4-point Gauss-Legendre (in ``ln x`` where ``g`` is
    interpolated in ``ln s``); the power-law tail beyond ``x = S t**(1/3)``
    is added in closed form.
    """
    _check_time(t)
    c = float(t) ** (1.0 / 3.0)
    g = sol.g
    seg = g.segments()
    x_nodes = c * g.s
    lo, hi = x_nodes[:-1], x_nodes[1:]
    log_mode = seg.log_mode
    safe_lo = np.where(log_mode, lo, 1.0)
    a = np.where(log_mode, np.log(safe_lo), lo)
    b = np.where(log_mode, np.log(np.where(log_mode, hi, 1.0)), hi)
    y = a[None, :] + _GAUSS_T[:, None] * (b - a)[None, :]
    x = np.where(log_mode[None, :], np.exp(y), y)
    u = eval_u(sol, t, x)
    wt = _GAUSS_W[:, None] * (b - a)[None, :] * np.where(log_mode[None, :], x, 1.0)
    body = 2.0 * np.sum(wt * u)
    X = x_nodes[-1]
    uX = float(eval_u(sol, t, X))
    return float(body + 2.0 * uX * X / (g.tail_exponent - 1.0))


class DeltaSample(NamedTuple):
    t: float
    peak_height: float
    half_width: float


def half_max_abscissa(g: ProfileSolution) -> float:
    """``s`` with ``g(s) = g(0)/2``, by bracketed root finding on the interpolant."""
    target = 0.5 * g.q[0]
    k = int(np.searchsorted(-g.q, -target))  # first node with q <= target
    lo, hi = g.s[k - 1], g.s[k]
    if g.q[k] == target:
        return float(hi)
    return float(brentq(lambda s: eval_profile(g, s).q - target, lo, hi, xtol=1e-15, rtol=1e-15))


def delta_diagnostics(sol: SimilaritySolution, t_list) -> list[DeltaSample]:
    """Peak height ``A t**(-1/3)`` and half width ``t**(1/3) s_half`` for each ``t``."""
    t_list = list(t_list)
    if not t_list:
        raise ValidationError("t_list must be nonempty")
    s_half = half_max_abscissa(sol.g)
    out = []
    for t in t_list:
        _check_time(t)
        c = float(t) ** (1.0 / 3.0)
        out.append(DeltaSample(float(t), sol.A_beta / c, c * s_half))
    return out
