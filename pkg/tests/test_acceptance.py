"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

The lines are collected by ``conftest.pytest_terminal_summary`` and printed
at the end of every pytest run; with ``-s`` they also appear inline.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import record_acceptance
from replicator_selfsim import (
    SimilaritySolution,
    calibrate,
    delta_diagnostics,
    derive_exponents,
    functionals,
    identity_residual,
    mass,
)
from replicator_selfsim.bounds_checker import (
    check_envelope,
    check_full_line_bounds,
    check_integral_bounds,
    check_limits,
    check_sup_bound,
)
from replicator_selfsim.cli import run
from replicator_selfsim.pde_evolver import validate_against_similarity

EPS = np.finfo(float).eps


def report(number, title, failures, detail=""):
    passed = not failures
    record_acceptance(number, title, passed, detail)
    print(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} {detail}")
    assert passed, failures[:10]


def test_criterion_01_exponents():
    e = derive_exponents()
    fails = []
    if (e.gamma, e.kappa, e.lam) != (Fraction(-2, 3), Fraction(1, 3), Fraction(1, 3)):
        fails.append(("exponents", e))
    if any(r != 0 for r in e.residuals()):
        fails.append(("residuals", e.residuals()))
    report(1, "exponent derivation", fails, f"(gamma, kappa, lambda) = ({e.gamma}, {e.kappa}, {e.lam})")


def test_criterion_02_identity(sweep_solutions, sweep_solutions_tight):
    fails, worst_res, worst_ratio = [], 0.0, math.inf
    for key, sol in sweep_solutions.items():
        r1 = identity_residual(sol, functionals(sol))
        tight = sweep_solutions_tight[key]
        r2 = identity_residual(tight, functionals(tight))
        ratio = r1 / r2 if r2 > 0 else math.inf
        worst_res, worst_ratio = max(worst_res, r1), min(worst_ratio, ratio)
        if not r1 <= 1e-6:
            fails.append((key, "residual", r1))
        if not ratio >= 5:
            fails.append((key, "shrink ratio", ratio))
    report(2, "integral identity", fails,
           f"(max residual {worst_res:.2e}, min shrink ratio {worst_ratio:.2f})")


def test_criterion_03_qualitative(sweep_solutions):
    fails = []
    for (a, mu, A), sol in sweep_solutions.items():
        pos = sol.s > 0
        if not (np.all(sol.q > 0) and np.all(sol.qp[pos] < 0)):
            fails.append(((a, mu, A), "sign"))
        if not sol.q[-1] < 1e-10 * A:
            fails.append(((a, mu, A), "terminal q", sol.q[-1]))
        if not abs(sol.qp[-1]) < 1e-8 * mu:
            fails.append(((a, mu, A), "terminal q'", sol.qp[-1]))
        if not abs(sol.tail_exponent - 3 * mu) <= 0.05 * 3 * mu:
            fails.append(((a, mu, A), "tail slope", sol.tail_exponent))
    report(3, "positivity, monotonicity and tail", fails)


def test_criterion_04_inequalities(sweep_solutions):
    fails = []
    for key, sol in sweep_solutions.items():
        fv = functionals(sol)
        checks = [check_sup_bound(sol), *check_integral_bounds(sol, fv)]
        checks += [c for c in check_full_line_bounds(sol, fv) if c.name == "gradient_upper"]
        fails += [(key, c.name, c.lhs, c.rhs) for c in checks if not c.satisfied]
    report(4, "sup-norm, integral and gradient bounds", fails)


def test_criterion_05_envelope(sweep_solutions):
    fails, count = [], 0
    for key, sol in sweep_solutions.items():
        checks = check_envelope(sol, n_samples=50)
        count += len(checks)
        if len(checks) != 100:
            fails.append((key, "sample count", len(checks)))
        fails += [(key, c.name) for c in checks if not c.satisfied]
    report(5, "two-sided tail envelope", fails, f"({count} checks)")


def test_criterion_06_calibration():
    fails = []
    for a in (0.5, 1.0, 2.0):
        for beta in (0.5, 1.0, 2.0):
            r = calibrate(a, beta)
            if not abs(r.Q_at_A - beta) / beta <= 1e-8:
                fails.append(((a, beta), "Q", r.Q_at_A))
            if not abs(r.mass - 1) <= 1e-6:
                fails.append(((a, beta), "mass", r.mass))
            again = calibrate(a, beta)
            if again.A_beta != r.A_beta or again.Q_at_A != r.Q_at_A:
                fails.append(((a, beta), "rerun differs"))
    report(6, "calibration to unit mass", fails)


def test_criterion_07_trends():
    rep = check_limits(1.0, 1.0, [10.0**k for k in range(-4, 3)])
    fails = []
    if not (rep.I_increasing and rep.Lam_increasing):
        fails.append("not increasing")
    if not rep.above_lower_bounds:
        fails.append("below lower bounds")
    if not rep.K[0] <= 3.5e-6:
        fails.append(("K at 1e-4", rep.K[0]))
    report(7, "amplitude trends", fails, f"(K(1e-4) = {rep.K[0]:.3e})")


@pytest.mark.slow
def test_criterion_08_pde(similarity_11):
    coarse = validate_against_similarity(similarity_11, n=2001, x_max=30.0, t0=1.0, t_end=1.5)
    fine = validate_against_similarity(similarity_11, n=4001, x_max=30.0, t0=1.0, t_end=1.5)
    ratio = coarse.final_error / fine.final_error
    fails = []
    if not coarse.max_error <= 1e-2:
        fails.append(("error", coarse.max_error))
    if not 3.2 <= ratio <= 4.8:
        fails.append(("refinement ratio", ratio))
    for rep in (coarse, fine):
        if not rep.max_mass_deviation <= 1e-4:
            fails.append((rep.n, "mass", rep.max_mass_deviation))
        if not rep.worst_undershoot >= -10 * EPS:
            fails.append((rep.n, "undershoot", rep.worst_undershoot))
    report(8, "PDE cross-validation", fails,
           f"(error {coarse.final_error:.2e}, ratio {ratio:.2f}, "
           f"mass deviation {coarse.max_mass_deviation:.1e})")


def test_criterion_09_delta(similarity_11):
    times = [10.0**k for k in range(-3, 4)]
    fails = [(t, "mass", m) for t in times if not abs((m := mass(similarity_11, t)) - 1) <= 1e-6]
    diag = delta_diagnostics(similarity_11, times)
    peaks = np.array([d.peak_height * d.t ** (1 / 3) for d in diag])
    widths = np.array([d.half_width * d.t ** (-1 / 3) for d in diag])
    for name, v in (("peak", peaks), ("width", widths)):
        spread = np.max(np.abs(v / v[0] - 1))
        if not spread <= 1e-12:
            fails.append((name, spread))
    report(9, "delta-approach scaling", fails)


def test_criterion_10_cli(tmp_path):
    fails = []
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        code = run(["--out-dir", str(d), "calibrate", "--a", "1", "--beta", "1"])
        if code != 0:
            fails.append(("exit", code))
    for name in ("g.csv", "result.json"):
        if (dirs[0] / name).read_bytes() != (dirs[1] / name).read_bytes():
            fails.append((name, "differs"))
    code = run(["--out-dir", str(tmp_path / "c"), "profile", "--a", "1", "--mu", "0.2", "--A", "1"])
    if code != 3:
        fails.append(("mu rejection exit", code))
    report(10, "CLI determinism and validation exit code", fails)
