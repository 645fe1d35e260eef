"""Direct time stepping of the nonlocal evolution equation.

    u_t = [u_xx + a t**(-2/3) x u_x + int u_x**2 dx + (a/2) t**(-2/3) int u**2 dx] u

Method of lines on a uniform symmetric grid with homogeneous Dirichlet
boundaries: second-order centred differences in space, classical RK4 in
time, and both integrals recomputed at every stage.  The diffusion
coefficient is ``u`` itself, so the explicit step limit scales with
``1/max(u)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NegativityError, StabilityViolation, ValidationError
from .similarity import SimilaritySolution, eval_u

log = logging.getLogger(__name__)

GAMMA = -2.0 / 3.0
DT_SAFETY = 1e-3  # the epsilon in the explicit bounds
UNDERSHOOT = 10.0 * np.finfo(float).eps


@dataclass(frozen=True)
class Grid:
    """Uniform grid on ``[-x_max, x_max]`` with an odd node count."""

    x_max: float
    n: int

    def __post_init__(self):
        if not self.x_max > 0:
            raise ValidationError(f"x_max must be positive, got {self.x_max}")
        if self.n < 5 or self.n % 2 == 0:
            raise ValidationError(f"n must be odd and at least 5, got {self.n}")

    @property
    def x_min(self) -> float:
        return -self.x_max

    @property
    def dx(self) -> float:
        return 2.0 * self.x_max / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        # exactly antisymmetric, so even data stays bit-exactly even
        half = self.n // 2
        return self.dx * np.arange(-half, half + 1, dtype=float)


@dataclass
class PdeState:
    """Nodal solution at time ``t``.

    ``mass_history`` and ``dt_history`` are filled by :func:`evolve`;
    ``clipped_mass`` accumulates roundoff-level negatives set to zero and
    ``worst_undershoot`` is the most negative ``min(u)/max(u)`` seen before
    clipping.
    """

    grid: Grid
    u: np.ndarray
    t: float
    mass_history: list = field(default_factory=list)
    dt_history: list = field(default_factory=list)
    clipped_mass: float = 0.0
    worst_undershoot: float = 0.0

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        if self.u.shape != (self.grid.n,):
            raise ValidationError(f"u has shape {self.u.shape}, grid has {self.grid.n} nodes")
        if not self.t > 0:
            raise ValidationError(f"t must be positive, got {self.t}")
        if np.any(self.u < 0):
            raise ValidationError("u must be nonnegative")

    @property
    def mass(self) -> float:
        return integrate(self.u, self.grid.dx)


def integrate(f, dx: float) -> float:
    """Composite trapezoid rule on a uniform grid."""
    return float(dx * (np.sum(f) - 0.5 * (f[0] + f[-1])))


def _nonlocal(u, dx):
    d = np.diff(u)
    return float(np.sum(d * d) / dx), float(dx * np.sum(u[:-1] * u[1:]))


def nonlocal_terms(state: PdeState) -> tuple[float, float]:
    """``(int u_x**2 dx, int u**2 dx)`` on the grid, both second order.

    ``u_x`` is the centred difference at cell midpoints, integrated by the
    midpoint rule; ``u**2`` is integrated as ``dx * sum(u_i u_{i+1})``.  These
    are exactly the sums produced by summation by parts of the diffusion and
    drift stencils, so the discrete total mass obeys the same balance law
    as the continuous one and stays at 1 up to the boundary truncation.
    """
    return _nonlocal(state.u, state.grid.dx)


def inner_Au_u(state: PdeState, a: float) -> float:
    """``(A u, u) = -int u_x**2 dx - (a/2) t**(-2/3) int u**2 dx``."""
    K, Lam = nonlocal_terms(state)
    return -K - 0.5 * a * state.t**GAMMA * Lam


def _operator(u, t, a, x, dx):
    K, Lam = _nonlocal(u, dx)
    drift = a * t**GAMMA
    out = np.zeros_like(u)
    ui = u[1:-1]
    uxx = ((u[2:] + u[:-2]) - 2.0 * ui) / (dx * dx)  # mirror-exact ordering
    ux = (u[2:] - u[:-2]) / (2.0 * dx)
    out[1:-1] = ui * (uxx + drift * x[1:-1] * ux + K + 0.5 * drift * Lam)
    return out


def step(state: PdeState, a: float, dt: float) -> PdeState:
    """Advance one classical RK4 step; histories are not touched.

    Raises:
        StabilityViolation: non-finite values after the step.
        NegativityError: an undershoot below ``-10 eps max(u)``.
    """
    if not dt > 0:
        raise ValidationError(f"dt must be positive, got {dt}")
    g = state.grid
    x, dx, t, u = g.x, g.dx, state.t, state.u
    with np.errstate(over="ignore", invalid="ignore"):
        k1 = _operator(u, t, a, x, dx)
        k2 = _operator(u + 0.5 * dt * k1, t + 0.5 * dt, a, x, dx)
        k3 = _operator(u + 0.5 * dt * k2, t + 0.5 * dt, a, x, dx)
        k4 = _operator(u + dt * k3, t + dt, a, x, dx)
        new = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    new[0] = new[-1] = 0.0
    if not np.all(np.isfinite(new)):
        raise StabilityViolation(f"non-finite values after step at t={t}, dt={dt}")
    clipped = 0.0
    neg = new < 0
    undershoot = state.worst_undershoot
    if neg.any():
        top = np.max(new)
        undershoot = min(undershoot, new.min() / top) if top > 0 else -math.inf
        threshold = -UNDERSHOOT * top
        if new.min() < threshold:
            raise NegativityError(
                f"undershoot {new.min():.3e} below {threshold:.3e} at t={t + dt}"
            )
        clipped = -integrate(np.where(neg, new, 0.0), dx)
        new[neg] = 0.0
        log.debug("clipped mass %.3e at t=%.6g", clipped, t + dt)
    return replace(
        state, u=new, t=t + dt, clipped_mass=state.clipped_mass + clipped,
        worst_undershoot=undershoot,
    )


def suggest_dt(state: PdeState, a: float) -> float:
    """Explicit stability limit from degenerate diffusion and drift.

    ``min(dx**2 / (2 u_max), dx / (a t**(-2/3) x_max u_max))`` shrunk by
    ``1 + DT_SAFETY``; infinite for ``u == 0``.
    """
    g = state.grid
    umax = float(np.max(state.u))
    if umax <= 0:
        return math.inf
    diffusion = g.dx**2 / (2.0 * umax * (1 + DT_SAFETY))
    drift = g.dx / (a * state.t**GAMMA * g.x_max * umax * (1 + DT_SAFETY))
    return min(diffusion, drift)


def evolve(
    initial: PdeState,
    a: float,
    t_end: float,
    cfl: float = 0.9,
    dt_max: float = math.inf,
    observe=None,
) -> PdeState:
    """Step from ``initial.t`` to ``t_end`` with ``dt = cfl * suggest_dt``.

    The last step is shortened to land on ``t_end``.  ``observe(state)`` is
    called after every step.  Mass and step size are recorded in the
    returned state's histories.
    """
    if not t_end > initial.t:
        raise ValidationError(f"t_end={t_end} must exceed the initial time {initial.t}")
    if not cfl > 0:
        raise ValidationError(f"cfl must be positive, got {cfl}")
    masses = list(initial.mass_history) or [(initial.t, initial.mass)]
    dts = list(initial.dt_history)
    state = replace(initial, u=initial.u.copy(), mass_history=masses, dt_history=dts)
    while state.t < t_end:
        dt = min(cfl * suggest_dt(state, a), dt_max, t_end - state.t)
        if not math.isfinite(dt):
            # u vanished identically: nothing evolves
            dt = t_end - state.t
        state = step(state, a, dt)
        if t_end - state.t < 1e-12 * t_end:
            state.t = t_end
        masses.append((state.t, state.mass))
        dts.append(dt)
        if observe is not None:
            observe(state)
    return state


def similarity_state(sim: SimilaritySolution, grid: Grid, t0: float = 1.0) -> PdeState:
    """Exact similarity data at ``t0`` sampled on ``grid``, zero on the boundary."""
    u = np.asarray(eval_u(sim, t0, grid.x), dtype=float)
    u[0] = u[-1] = 0.0
    return PdeState(grid, u, t0)


@dataclass
class ValidationReport:
    """Comparison of a PDE run with the closed-form similarity solution.

    ``error_history`` holds ``(t, max|u - u_exact| / max|u_exact|)`` after
    every step; ``max_error`` is its maximum and ``final_error`` its last
    entry.
    """

    a: float
    n: int
    x_max: float
    t0: float
    t_end: float
    cfl: float
    final_error: float
    max_error: float
    max_mass_deviation: float
    worst_undershoot: float
    clipped_mass: float
    steps: int
    error_history: list
    mass_history: list
    dt_history: list
    final_state: PdeState = field(repr=False)

    def record(self) -> dict:
        return {
            "a": self.a, "n": self.n, "x_max": self.x_max, "t0": self.t0,
            "t_end": self.t_end, "cfl": self.cfl, "final_error": self.final_error,
            "max_error": self.max_error, "max_mass_deviation": self.max_mass_deviation,
            "worst_undershoot": self.worst_undershoot, "clipped_mass": self.clipped_mass,
            "steps": self.steps,
            "error_history": [list(p) for p in self.error_history],
            "mass_history": [list(p) for p in self.mass_history],
            "dt_history": list(self.dt_history),
        }


def validate_against_similarity(
    sim: SimilaritySolution,
    n: int = 2001,
    x_max: float = 30.0,
    t0: float = 1.0,
    t_end: float = 1.5,
    cfl: float = 0.9,
    observe=None,
) -> ValidationReport:
    """Evolve exact similarity data from ``t0`` and track the error to ``t_end``."""
    grid = Grid(x_max, n)
    x = grid.x
    errors = []

    def track(state):
        exact = eval_u(sim, state.t, x)
        errors.append((state.t, float(np.max(np.abs(state.u - exact)) / np.max(exact))))
        if observe is not None:
            observe(state)

    final = evolve(similarity_state(sim, grid, t0), sim.a, t_end, cfl, observe=track)
    dev = max(abs(m - 1.0) for _, m in final.mass_history)
    return ValidationReport(
        a=sim.a, n=n, x_max=x_max, t0=t0, t_end=t_end, cfl=cfl,
        final_error=errors[-1][1], max_error=max(e for _, e in errors),
        max_mass_deviation=dev, worst_undershoot=final.worst_undershoot,
        clipped_mass=final.clipped_mass, steps=len(final.dt_history),
        error_history=errors, mass_history=list(final.mass_history),
        dt_history=list(final.dt_history), final_state=final,
    )
