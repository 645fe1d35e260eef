"""Check the a priori bounds over a parameter sweep.

Run:  python demos/04_bounds_sweep.py
"""

from replicator_selfsim.bounds_checker import check_limits, sweep

# Every computed profile should respect the sup-norm bound on q', the lower
# bounds on its integrals, the upper bound on the gradient energy and the
# two-sided tail envelope.
for rep in sweep():
    p = rep.params
    tight = min(rep.checks, key=lambda c: c.margin if "envelope" in c.name else c.margin / abs(c.rhs))
    print(f"a={p.a:<4g} mu={p.mu:<4g} A={p.A:<5g} {'ok' if rep.satisfied else 'FAIL'}"
          f"  ({len(rep.checks)} checks, tightest: {tight.name})")

# Small amplitudes give small integrals; large amplitudes give large ones.
lim = check_limits(1.0, 1.0, [1e-4, 1e-3, 1e-2, 1e-1, 1, 10, 100])
for A, I, lo in zip(lim.A, lim.I, lim.I_lower):
    print(f"A={A:<7g} I={I:.6e}  lower bound {lo:.6e}")
print("trends hold:", lim.satisfied)
