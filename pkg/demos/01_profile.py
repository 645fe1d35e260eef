"""Solve the auxiliary profile problem and look at its shape.

Run:  python demos/01_profile.py
"""

import numpy as np

from replicator_selfsim import ProfileParams, eval_profile, functionals, identity_residual, solve_profile

# Start from q(0) = A, q'(0) = 0 and integrate outwards.  The profile is
# positive and decreasing; far out it decays like s**(-3 mu).
params = ProfileParams(a=1.0, mu=1.0, A=1.0)
sol = solve_profile(params)
print(f"{sol.s.size} nodes, stopped at s = {sol.terminal_s:.3e} ({sol.terminated_by.value})")
print(f"fitted tail exponent {sol.tail_exponent:.6f}  (3 mu = {3 * params.mu})")

# The interpolant is available anywhere inside the solved range, and the
# profile is even.
for s in (0.0, 0.5, 1.0, 2.0, 10.0, 100.0):
    q, qp, _ = eval_profile(sol, s)
    print(f"  q({s:6g}) = {q:.12e}   q'({s:6g}) = {qp:.6e}")

# Whole-line integrals and the exact identity linking them.
fv = functionals(sol)
print(f"I = {fv.I:.14f}  K = {fv.K:.14f}  Lam = {fv.Lam:.14f}")
print(f"(mu - 1/3) I = K + (a/2) Lam holds to {identity_residual(sol, fv):.1e}")

# A large amplitude makes the decay logarithmic for a long stretch before
# the power law takes over, which is why the solver runs in ln s.
wide = solve_profile(ProfileParams(a=2.0, mu=0.5, A=10.0))
s = np.geomspace(1, wide.terminal_s, 6)
print("a=2, mu=0.5, A=10:", ", ".join(f"q({x:.1e})={v:.2e}" for x, v in zip(s, eval_profile(wide, s).q)))
