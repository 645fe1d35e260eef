"""Independent reference computations used only by the tests."""

import math
import warnings

import numpy as np
from scipy.integrate import solve_ivp


def reference_integrals(a, mu, A, rtol=1e-13, floor=1e-40):
    """``(I, K, Lam)`` by carrying the integrals as extra ODE states.

    Shares no code with the package: scipy's ``solve_ivp`` integrates the
    log-variable system together with the running integrals of ``q``,
    ``q**2`` and ``q'**2`` until ``q`` falls below ``floor * A``.
    """

    def near(s, y):
        w, z = y[:2]
        q = math.exp(w)
        return [z, -(1 / (3 * q) + a) * s * z - mu / q - z * z, q, q * q, (q * z) ** 2]

    def far(tau, y):
        w, v = y[:2]
        s = math.exp(tau)
        q = math.exp(w)
        return [v, v - v * v - s * s * ((1 / (3 * q) + a) * v + mu / q), q * s, q * q * s,
                (q * v) ** 2 / s]

    def hit_floor(tau, y):
        return y[0] - math.log(floor * A)

    hit_floor.terminal = True
    with warnings.catch_warnings():
        # scipy's finite-difference Jacobian overflows harmlessly in the far tail
        warnings.simplefilter("ignore", RuntimeWarning)
        r1 = solve_ivp(near, [0, 1], [math.log(A), 0, 0, 0, 0], method="Radau",
                       rtol=rtol, atol=[rtol, 1e-16, 1e-20, 1e-20, 1e-20])
        r2 = solve_ivp(far, [0, 300], list(r1.y[:, -1]), method="Radau", rtol=rtol,
                       atol=[rtol, rtol, 1e-30, 1e-30, 1e-30], events=hit_floor, max_step=0.5)
    y = r2.y[:, -1]
    return 2 * y[2], 2 * y[4], 2 * y[3]


def q_second_derivative_at_zero(sol):
    """Fit ``q'(s) = c1 s + c3 s**3`` through the first two positive nodes; return ``c1``."""
    s, qp = sol.s[1:3], sol.qp[1:3]
    m = np.array([[s[0], s[0] ** 3], [s[1], s[1] ** 3]])
    return float(np.linalg.solve(m, qp)[0])
