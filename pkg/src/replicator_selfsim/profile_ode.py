"""Auxiliary initial-value problem for the similarity profile.

Solves

    q'' q + a s q' q + mu q + s q' / 3 = 0,   q(0) = A,  q'(0) = 0

on ``s >= 0`` for ``mu > 1/3``; the solution is even in ``s``.

The profile decays algebraically, ``q ~ C s**(-3 mu)``, and the term
``s q' / (3 q)`` makes the equation stiff once ``q`` is small.  The solver
therefore integrates the logarithmic variables ``w = ln q`` and ``z = q'/q``
with an implicit Radau IIA method (order 5, embedded error estimate):

* on ``[0, 1]`` in ``s`` with state ``(w - ln A, z)``;
* beyond ``s = 1`` in ``tau = ln s`` with state ``(w, s z)``, where the tail
  is a straight line and steps grow geometrically.

Positivity of ``q`` holds by construction, so no step-size cap tied to
``q/|q'|`` is needed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.integrate import Radau

from ._hermite import S_SWITCH, build_segments
from .errors import (
    NonPositiveEncountered,
    NumericalError,
    OutOfRange,
    StepLimitExceeded,
    ValidationError,
)

# Relative tolerance of the log-variable phase.  The tail state is dominated
# by absolute control on (w, s z); a tight fixed relative part keeps the
# tolerance-to-error map close to proportional.
_TAU_RTOL = 1e-13
_MAX_DS = 0.05
_MAX_DTAU = 0.5
# e**(2 tau) must stay finite inside the tail right-hand side
_S_MAX_LIMIT = 1e150


@dataclass(frozen=True)
class ProfileParams:
    """Parameters ``(a, mu, A)`` of the auxiliary problem."""

    a: float
    mu: float
    A: float

    def __post_init__(self):
        for name in ("a", "mu", "A"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValidationError(f"{name} must be a finite number, got {v!r}")
        if self.a <= 0:
            raise ValidationError(f"a must be positive, got {self.a}")
        if self.mu <= 1 / 3:
            raise ValidationError(f"mu must exceed 1/3, got {self.mu}")
        if self.A <= 0:
            raise ValidationError(f"A must be positive, got {self.A}")


@dataclass(frozen=True)
class SolverConfig:
    """Integrator settings.

    Attributes:
        rel_tol: local error tolerance on ``ln q`` and the log-slope, i.e. a
            relative tolerance on ``q`` itself.
        abs_tol: absolute scale below which residuals are not resolved.
        s_max: truncation abscissa.
        q_floor: stop once ``q`` drops below this value; ``None`` means
            ``1e-30 * A``.
        max_steps: integrator step budget.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    s_max: float = 1e100
    q_floor: float | None = None
    max_steps: int = 10**7

    def __post_init__(self):
        if not (0 < self.abs_tol <= self.rel_tol <= 1e-3):
            raise ValidationError(
                f"need 0 < abs_tol <= rel_tol <= 1e-3, got abs_tol={self.abs_tol}, "
                f"rel_tol={self.rel_tol}"
            )
        if not (0 < self.s_max <= _S_MAX_LIMIT):
            raise ValidationError(f"s_max must lie in (0, {_S_MAX_LIMIT:g}], got {self.s_max}")
        if self.q_floor is not None and not self.q_floor > 0:
            raise ValidationError(f"q_floor must be positive, got {self.q_floor}")
        if int(self.max_steps) != self.max_steps or self.max_steps < 1:
            raise ValidationError(f"max_steps must be a positive integer, got {self.max_steps}")

    def floor_for(self, params: ProfileParams) -> float:
        floor = 1e-30 * params.A if self.q_floor is None else self.q_floor
        if floor >= params.A:
            raise ValidationError(f"q_floor={floor} must be below A={params.A}")
        return floor

    def tightened(self, factor: float = 10.0) -> "SolverConfig":
        """Copy with both tolerances divided by ``factor``."""
        return SolverConfig(
            rel_tol=self.rel_tol / factor,
            abs_tol=self.abs_tol / factor,
            s_max=self.s_max,
            q_floor=self.q_floor,
            max_steps=self.max_steps,
        )


class TerminationReason(str, enum.Enum):
    TAIL_FLOOR = "TailFloor"
    S_MAX = "SMax"
    STEP_LIMIT = "StepLimit"


def _frozen(x) -> np.ndarray:
    arr = np.array(x, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ProfileSolution:
    """Node representation of a solved profile on ``[0, terminal_s]``.

    ``s``, ``q`` and ``qp`` are read-only arrays; everything else about the
    profile (interpolation, integrals) is derived from them alone, so a
    solution reloaded from CSV behaves identically to a fresh one.
    """

    params: ProfileParams
    s: np.ndarray
    q: np.ndarray
    qp: np.ndarray
    terminated_by: TerminationReason
    tail_exponent: float
    config: SolverConfig = field(default_factory=SolverConfig)
    steps: int = 0

    def __post_init__(self):
        for name in ("s", "q", "qp"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        if not (self.s.shape == self.q.shape == self.qp.shape) or self.s.size < 2:
            raise ValidationError("node arrays must share a shape with at least two nodes")

    @property
    def nodes(self) -> np.ndarray:
        """Nodes as an ``(n, 3)`` array of ``(s, q, q')``."""
        return np.column_stack([self.s, self.q, self.qp])

    @property
    def terminal_s(self) -> float:
        return float(self.s[-1])

    def segments(self):
        seg = self.__dict__.get("_segments")
        if seg is None:
            seg = build_segments(self.s, self.q, self.qp)
            object.__setattr__(self, "_segments", seg)
        return seg

    def record(self) -> dict:
        """JSON-ready metadata (everything except the node arrays)."""
        return {
            "params": asdict(self.params),
            "config": asdict(self.config),
            "terminated_by": self.terminated_by.value,
            "tail_exponent": self.tail_exponent,
            "terminal_s": self.terminal_s,
            "node_count": int(self.s.size),
            "steps": self.steps,
            "tail_qp_extrapolation": "heuristic: derivative of the power-law tail",
        }


def rhs(s: float, q: float, qp: float, params: ProfileParams) -> float:
    """Second derivative ``q''`` from the ODE solved for it.

    Raises:
        NonPositiveEncountered: if ``q <= 0``.
    """
    if not q > 0:
        raise NonPositiveEncountered(f"q={q} at s={s}; the profile must stay positive")
    return -(1.0 / (3.0 * q) + params.a) * s * qp - params.mu


def fit_tail_exponent(s, q) -> float:
    """Least-squares ``-d ln q / d ln s`` over the last decade of ``s``."""
    s = np.asarray(s, dtype=float)
    q = np.asarray(q, dtype=float)
    mask = s >= s[-1] / 10
    mask &= s > 0
    if mask.sum() < 2:
        mask = np.zeros_like(mask)
        mask[-2:] = True
    slope = np.polyfit(np.log(s[mask]), np.log(q[mask]), 1)[0]
    return float(-slope)


def _near_field(p: ProfileParams):
    a, mu, w0 = p.a, p.mu, math.log(p.A)

    def f(s, y):
        u, z = y
        iq = math.exp(-(u + w0))
        return np.array([z, -(iq / 3 + a) * s * z - mu * iq - z * z])

    def jac(s, y):
        u, z = y
        iq = math.exp(-(u + w0))
        return np.array([[0.0, 1.0], [(s * z / 3 + mu) * iq, -(iq / 3 + a) * s - 2 * z]])

    return f, jac


def _far_field(p: ProfileParams):
    a, mu = p.a, p.mu

    def f(tau, y):
        w, v = y
        e2 = math.exp(2 * tau)
        iq = math.exp(-w)
        return np.array([v, v - v * v - e2 * ((iq / 3 + a) * v + mu * iq)])

    def jac(tau, y):
        w, v = y
        e2 = math.exp(2 * tau)
        iq = math.exp(-w)
        return np.array([[0.0, 1.0], [e2 * (v / 3 + mu) * iq, 1 - 2 * v - e2 * (iq / 3 + a)]])

    return f, jac


def solve_profile(
    params: ProfileParams,
    cfg: SolverConfig | None = None,
    *,
    allow_partial: bool = False,
) -> ProfileSolution:
    """Integrate the auxiliary problem until the tail floor, ``s_max`` or the step budget.

    Args:
        params: problem parameters.
        cfg: solver settings; defaults to :class:`SolverConfig()`.
        allow_partial: return the nodes computed so far, marked
            ``STEP_LIMIT``, instead of raising when the budget runs out.

    Raises:
        StepLimitExceeded: step budget exhausted and ``allow_partial`` false.
        NonPositiveEncountered: ``q`` underflowed or the state became non-finite.
        NumericalError: the integrator failed or monotonicity was lost.
    """
    cfg = cfg or SolverConfig()
    floor = cfg.floor_for(params)
    log_floor = math.log(floor)
    w0 = math.log(params.A)
    tol = cfg.rel_tol
    atol = np.array([tol, tol])

    S, W, Z = [0.0], [w0], [0.0]
    steps = 0
    reason = None

    def budget_left():
        return steps < cfg.max_steps

    def check(w, z, at):
        if not (math.isfinite(w) and math.isfinite(z)):
            raise NonPositiveEncountered(f"non-finite state at s={at}")
        if math.exp(w) <= 0.0:
            raise NonPositiveEncountered(f"q underflowed to zero at s={at}")
        if z >= 0.0:
            raise NumericalError(f"profile stopped decreasing at s={at} (q'/q={z})")

    f, jac = _near_field(params)
    s_end = min(S_SWITCH, cfg.s_max)
    ode = Radau(f, 0.0, np.zeros(2), s_end, rtol=tol, atol=atol, jac=jac, max_step=_MAX_DS)
    while ode.status == "running":
        if not budget_left():
            reason = TerminationReason.STEP_LIMIT
            break
        msg = ode.step()
        steps += 1
        if ode.status == "failed":
            raise NumericalError(f"integrator failed near s={ode.t}: {msg}")
        w, z = ode.y[0] + w0, ode.y[1]
        check(w, z, ode.t)
        S.append(ode.t), W.append(w), Z.append(z)
        if w < log_floor:
            reason = TerminationReason.TAIL_FLOOR
            break
    if reason is None and cfg.s_max <= S_SWITCH:
        reason = TerminationReason.S_MAX

    if reason is None:
        f, jac = _far_field(params)
        tau0 = math.log(S_SWITCH)
        ode = Radau(
            f, tau0, np.array([W[-1], Z[-1] * S_SWITCH]), math.log(cfg.s_max),
            rtol=_TAU_RTOL, atol=atol, jac=jac, max_step=_MAX_DTAU,
        )
        while ode.status == "running":
            if not budget_left():
                reason = TerminationReason.STEP_LIMIT
                break
            msg = ode.step()
            steps += 1
            if ode.status == "failed":
                raise NumericalError(f"integrator failed near s={math.exp(ode.t)}: {msg}")
            s = math.exp(ode.t)
            w, z = ode.y[0], ode.y[1] / s
            check(w, z, s)
            S.append(s), W.append(w), Z.append(z)
            if w < log_floor:
                reason = TerminationReason.TAIL_FLOOR
                break
        if reason is None:
            reason = TerminationReason.S_MAX

    if reason is TerminationReason.STEP_LIMIT and not allow_partial:
        raise StepLimitExceeded(f"{cfg.max_steps} steps used, reached s={S[-1]}")

    s_arr = np.array(S)
    q = np.exp(np.array(W))
    q[0] = params.A
    qp = q * np.array(Z)
    qp[0] = 0.0
    if np.any(np.diff(q) >= 0):
        raise NumericalError("node values of q are not strictly decreasing")
    return ProfileSolution(
        params=params,
        s=s_arr,
        q=q,
        qp=qp,
        terminated_by=reason,
        tail_exponent=fit_tail_exponent(s_arr, q),
        config=cfg,
        steps=steps,
    )


class ProfileValue(NamedTuple):
    q: np.ndarray | float
    qp: np.ndarray | float
    extrapolated: np.ndarray | bool


def eval_profile(sol: ProfileSolution, s, extrapolate: bool = False) -> ProfileValue:
    """Evaluate ``(q(|s|), sign(s) q'(|s|))`` by interpolation.

    Beyond ``terminal_s`` the power-law tail
    ``q(terminal_s) (|s|/terminal_s)**(-tail_exponent)`` is used when
    ``extrapolate`` is true; those entries are flagged in ``extrapolated``.
    The derivative there comes from differentiating the power law and is
    only a heuristic.

    Raises:
        OutOfRange: ``|s| > terminal_s`` without ``extrapolate``.
    """
    scalar = np.ndim(s) == 0
    s = np.asarray(s, dtype=float)
    r = np.abs(s).ravel()
    S = sol.s
    beyond = r > S[-1]
    if beyond.any() and not extrapolate:
        raise OutOfRange(
            f"|s|={r[beyond].max()} exceeds terminal_s={S[-1]}; pass extrapolate=True"
        )
    q = np.empty_like(r)
    qp = np.empty_like(r)

    inside = ~beyond
    if inside.any():
        ri = r[inside]
        idx = np.clip(np.searchsorted(S, ri, side="right") - 1, 0, S.size - 2)
        seg = sol.segments()
        t = np.where(
            seg.log_mode[idx],
            (np.log(np.where(seg.log_mode[idx], ri, 1.0)) - seg.x0[idx]) / seg.h[idx],
            (ri - seg.x0[idx]) / seg.h[idx],
        )
        qi, qpi, _ = seg.evaluate(idx, t)
        # nodes are returned verbatim
        at_left = ri == S[idx]
        at_right = ri == S[idx + 1]
        qi = np.where(at_left, sol.q[idx], np.where(at_right, sol.q[idx + 1], qi))
        qpi = np.where(at_left, sol.qp[idx], np.where(at_right, sol.qp[idx + 1], qpi))
        q[inside], qp[inside] = qi, qpi

    if beyond.any():
        p = sol.tail_exponent
        rb = r[beyond]
        qb = sol.q[-1] * (rb / S[-1]) ** (-p)
        q[beyond], qp[beyond] = qb, -p * qb / rb

    qp = np.where(s.ravel() < 0, -qp, qp)
    q, qp, beyond = q.reshape(s.shape), qp.reshape(s.shape), beyond.reshape(s.shape)
    if scalar:
        return ProfileValue(float(q), float(qp), bool(beyond))
    return ProfileValue(q, qp, beyond)


def midpoint_residuals(sol: ProfileSolution) -> np.ndarray:
    """Relative ODE residual at the midpoint of every node interval.

    ``q`` and ``q'`` come from the interpolant; ``q''`` is the derivative of
    a cubic Hermite interpolant of ``q'`` built from node values of ``q'``
    and ``q''`` (the latter from :func:`rhs` at the nodes).  The residual
    ``q'' q + a s q' q + mu q + s q'/3`` is scaled by ``max(mu q, abs_tol)``.
    """
    p = sol.params
    S, Q, QP = sol.s, sol.q, sol.qp
    Q2 = -(1.0 / (3.0 * Q) + p.a) * S * QP - p.mu
    m = S.size - 1
    idx = np.arange(m)
    sm = 0.5 * (S[:-1] + S[1:])
    q, qp, _ = eval_profile(sol, sm)
    h = np.diff(S)
    # derivative of the Hermite interpolant of q' at t = 1/2
    q2 = 1.5 * (QP[idx + 1] - QP[idx]) / h - 0.25 * (Q2[idx] + Q2[idx + 1])
    res = q2 * q + p.a * sm * qp * q + p.mu * q + sm * qp / 3
    return np.abs(res) / np.maximum(p.mu * q, sol.config.abs_tol)
