"""Piecewise cubic Hermite representation of a profile in log variables.

A profile is stored as nodes (s, q, q').  Between nodes, ``w = ln q`` is a
cubic Hermite interpolant built from ``w`` and its first derivative.  Near
the origin the interpolation variable is ``s``; on intervals extending past
``S_SWITCH`` it is ``tau = ln s``, where the algebraic tail is smooth and the
integrator takes geometrically growing steps.  Only first derivatives are
used: second derivatives recovered from the ODE cancel catastrophically in
the stiff tail.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

S_SWITCH = 1.0


def basis(t):
    """Cubic Hermite basis and its derivative at local coordinates ``t``."""
    t = np.asarray(t, dtype=float)
    t2, t3 = t * t, t * t * t
    h = np.stack([2 * t3 - 3 * t2 + 1, t3 - 2 * t2 + t, -2 * t3 + 3 * t2, t3 - t2])
    d = np.stack([6 * t2 - 6 * t, 3 * t2 - 4 * t + 1, -6 * t2 + 6 * t, 3 * t2 - 2 * t])
    return h, d


@dataclass(frozen=True)
class Segments:
    """Per-interval interpolation data.

    Attributes:
        x0: left end of each interval in its interpolation variable.
        h: interval width in that variable.
        coef: (4, m) Hermite coefficients ``[w0, h*w0', w1, h*w1']``.
        log_mode: True where the variable is ``ln s``.
    """

    x0: np.ndarray
    h: np.ndarray
    coef: np.ndarray
    log_mode: np.ndarray

    def evaluate(self, idx, t):
        """Return ``(q, dq/ds, s)`` at local coordinate ``t`` of intervals ``idx``.

        ``idx`` and ``t`` broadcast against each other.
        """
        hb, db = basis(t)
        c = self.coef[:, idx]
        w = np.sum(hb * c, axis=0)
        h = self.h[idx]
        dw = np.sum(db * c, axis=0) / h
        x = self.x0[idx] + t * h
        log_mode = self.log_mode[idx]
        s = np.where(log_mode, np.exp(np.where(log_mode, x, 0.0)), x)
        q = np.exp(w)
        qp = np.where(log_mode, q * dw / np.where(log_mode, s, 1.0), q * dw)
        return q, qp, s


def build_segments(s, q, qp) -> Segments:
    """Assemble interpolation data from node arrays."""
    s = np.asarray(s, dtype=float)
    w = np.log(q)
    z = np.asarray(qp, dtype=float) / q
    log_mode = s[1:] > S_SWITCH
    safe_s = np.where(s > 0, s, 1.0)
    # each interval needs both ends in its own variable
    left = np.where(log_mode, np.log(safe_s[:-1]), s[:-1])
    right = np.where(log_mode, np.log(safe_s[1:]), s[1:])
    dleft = np.where(log_mode, s[:-1] * z[:-1], z[:-1])
    dright = np.where(log_mode, s[1:] * z[1:], z[1:])
    h = right - left
    coef = np.stack([w[:-1], h * dleft, w[1:], h * dright])
    return Segments(x0=left, h=h, coef=coef, log_mode=log_mode)
