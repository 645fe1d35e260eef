"""Evolve the full nonlocal equation from exact data and compare.

Run:  python demos/03_pde_cross_validation.py
"""

from replicator_selfsim import SimilaritySolution, calibrate, validate_against_similarity

sim = SimilaritySolution.from_calibration(calibrate(a=1.0, beta=1.0))

# Start from the similarity solution at t = 1 and step the PDE to t = 1.5.
# The error should fall by about 4x each time the grid spacing halves.
previous = None
for n in (1001, 2001, 4001):
    rep = validate_against_similarity(sim, n=n, x_max=30.0, t0=1.0, t_end=1.5)
    ratio = "" if previous is None else f"  ratio {previous / rep.final_error:.2f}"
    print(f"n={n:5d}: {rep.steps:5d} steps, relative sup error {rep.final_error:.3e}, "
          f"mass deviation {rep.max_mass_deviation:.1e}{ratio}")
    previous = rep.final_error
