"""Calibrate the amplitude so the profile has unit mass, then watch it concentrate.

Run:  python demos/02_calibration_and_similarity.py
"""

from replicator_selfsim import SimilaritySolution, calibrate, delta_diagnostics, eval_u, mass

# With mu = beta + 1/3, choosing A so that K + (a/2) Lam = beta forces the
# profile to integrate to one.
res = calibrate(a=1.0, beta=1.0)
print(f"A_beta = {res.A_beta:.15f} after {res.iterations} refinement steps, bracket {res.bracket}")
print(f"Q(A_beta) = {res.Q_at_A:.12f}, mass = {res.mass:.12f}")

# The similarity solution u(t, x) = t**(-1/3) g(x t**(-1/3)) keeps its mass
# while the peak grows and the width shrinks as t -> 0.
sim = SimilaritySolution.from_calibration(res)
print("exponents:", sim.exponents.gamma, sim.exponents.kappa, sim.exponents.lam)
print(f"{'t':>8} {'mass':>18} {'peak':>14} {'half width':>14}")
for d in delta_diagnostics(sim, [1e-3, 1e-2, 1e-1, 1.0, 10.0]):
    print(f"{d.t:>8g} {mass(sim, d.t):>18.15f} {d.peak_height:>14.8f} {d.half_width:>14.8f}")

print("u(2, x) at x = 0, 1, 2:", eval_u(sim, 2.0, [0.0, 1.0, 2.0]))
