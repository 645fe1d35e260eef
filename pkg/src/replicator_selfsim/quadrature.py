"""Integrals of a solved profile over the whole line.

Each node interval is integrated with 4-point Gauss-Legendre applied to the
same cubic Hermite interpolant that :func:`eval_profile` uses, so the rule
is consistent with the dense representation and depends on the stored
nodes only.  Past ``terminal_s`` the fitted power law ``q ~ s**(-p)`` gives
closed-form tail corrections.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import NonIntegrableTail
from .profile_ode import ProfileSolution

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(4)
_GAUSS_T = 0.5 * (_GAUSS_X + 1.0)
_GAUSS_W = 0.5 * _GAUSS_W


@dataclass(frozen=True)
class FunctionalValues:
    """Whole-line integrals of a profile.

    Attributes:
        I: integral of q.
        K: integral of q'**2.
        Lam: integral of q**2.
        tail_bound: estimated contribution of ``|s| > terminal_s`` to ``I``
            (already included in ``I``).
        tail_Lam: same for ``Lam``.
        tail_K: same for ``K``; heuristic, from the differentiated power law.
    """

    I: float
    K: float
    Lam: float
    tail_bound: float
    tail_Lam: float = 0.0
    tail_K: float = 0.0

    def record(self) -> dict:
        return asdict(self)


def half_line_integrals(sol: ProfileSolution, upto: int | None = None) -> np.ndarray:
    """``[int q, int q'^2, int q^2]`` over ``[0, s[upto]]`` without tail terms.

    ``upto`` defaults to the last node.
    """
    seg = sol.segments()
    m = seg.h.size if upto is None else upto
    idx = np.arange(m)
    q, qp, s = seg.evaluate(idx[None, :], _GAUSS_T[:, None])
    h = seg.h[:m]
    # in log mode ds = s dtau
    wt = _GAUSS_W[:, None] * h * np.where(seg.log_mode[:m], s, 1.0)
    return np.array([np.sum(wt * q), np.sum(wt * qp * qp), np.sum(wt * q * q)])


def functionals(sol: ProfileSolution) -> FunctionalValues:
    """Return ``I``, ``K`` and ``Lam`` over the whole line.

    Raises:
        NonIntegrableTail: if the fitted tail exponent is ``<= 1``.
    """
    p = sol.tail_exponent
    if not p > 1:
        raise NonIntegrableTail(f"tail exponent {p} <= 1; the integral of q diverges")
    body_I, body_K, body_L = 2.0 * half_line_integrals(sol)
    S, qT = sol.terminal_s, float(sol.q[-1])
    tail_I = 2.0 * qT * S / (p - 1.0)
    tail_L = 2.0 * qT * qT * S / (2.0 * p - 1.0)
    tail_K = 2.0 * p * p * qT * qT / (S * (2.0 * p + 1.0))
    return FunctionalValues(
        I=float(body_I + tail_I),
        K=float(body_K + tail_K),
        Lam=float(body_L + tail_L),
        tail_bound=float(tail_I),
        tail_Lam=float(tail_L),
        tail_K=float(tail_K),
    )


def identity_residual(sol: ProfileSolution, fv: FunctionalValues) -> float:
    """Relative defect of ``(mu - 1/3) I = K + (a/2) Lam``."""
    a, mu = sol.params.a, sol.params.mu
    lhs = (mu - 1.0 / 3.0) * fv.I
    return abs(lhs - fv.K - 0.5 * a * fv.Lam) / lhs
