"""Command-line front end.

Subcommands: ``profile``, ``calibrate``, ``similarity``, ``validate-pde`` and
``check-bounds``.  Each writes its data files plus ``manifest.json`` into the
output directory.  Exit codes: 0 success, 2 usage error, 3 invalid
parameters, 4 numerical failure.  Errors are reported on stderr as one JSON
object.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import io
from .bounds_checker import SWEEP_A, SWEEP_AMP, SWEEP_MU, sweep
from .calibration import calibrate
from .errors import NumericalError, SelfSimError, ValidationError
from .pde_evolver import validate_against_similarity
from .profile_ode import ProfileParams, SolverConfig, solve_profile
from .quadrature import functionals, identity_residual
from .similarity import SimilaritySolution, delta_diagnostics, eval_u, mass

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3, 4


def _floats(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _solver_args(p):
    g = p.add_argument_group("solver")
    g.add_argument("--rel-tol", type=float, default=1e-10)
    g.add_argument("--abs-tol", type=float, default=1e-12)
    g.add_argument("--s-max", type=float, default=1e100)
    g.add_argument("--q-floor", type=float, default=None, help="default 1e-30 * A")
    g.add_argument("--max-steps", type=int, default=10**7)


def _config(ns) -> SolverConfig:
    return SolverConfig(ns.rel_tol, ns.abs_tol, ns.s_max, ns.q_floor, ns.max_steps)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="replicator-selfsim", description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default=None,
                        help=f"output directory (default ${io.OUT_DIR_ENV}/<command> or ./out/<command>)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="solve the auxiliary profile problem")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--A", type=float, required=True)
    _solver_args(p)

    p = sub.add_parser("calibrate", help="find the unit-mass amplitude for beta")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    _solver_args(p)

    p = sub.add_parser("similarity", help="sample u(t, x) and delta diagnostics")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--t", type=_floats, required=True, help="comma-separated times")
    p.add_argument("--x-max", type=float, default=10.0)
    p.add_argument("--nx", type=int, default=401)
    p.add_argument("--tol", type=float, default=1e-8)
    _solver_args(p)

    p = sub.add_parser("validate-pde", help="evolve the PDE and compare with the similarity solution")
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--n", type=int, default=2001)
    p.add_argument("--x-max", type=float, default=30.0)
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--t-end", type=float, default=1.5)
    p.add_argument("--cfl", type=float, default=0.9)
    p.add_argument("--snapshots", type=_floats, default=[], help="times for CSV snapshots")
    p.add_argument("--tol", type=float, default=1e-8)
    _solver_args(p)

    p = sub.add_parser("check-bounds", help="check the a priori bounds over a sweep")
    p.add_argument("--a", type=_floats, default=list(SWEEP_A))
    p.add_argument("--mu", type=_floats, default=list(SWEEP_MU))
    p.add_argument("--A", type=_floats, default=list(SWEEP_AMP))
    _solver_args(p)
    return parser


def _inputs(ns) -> dict:
    return {k: v for k, v in vars(ns).items() if k not in ("out_dir",)}


def cmd_profile(ns, out):
    params = ProfileParams(ns.a, ns.mu, ns.A)
    cfg = _config(ns)
    sol = solve_profile(params, cfg)
    fv = functionals(sol)
    extra = {"functionals": fv.record(), "identity_residual": identity_residual(sol, fv)}
    io.write_profile(sol, out / "profile.csv", out / "profile.json", extra)
    status = {"terminated_by": sol.terminated_by.value}
    print(f"profile: {sol.s.size} nodes to s={sol.terminal_s:.6g} ({sol.terminated_by.value}); "
          f"I={fv.I:.12g} K={fv.K:.12g} Lam={fv.Lam:.12g}")
    return [out / "profile.csv", out / "profile.json"], status


def _calibrated(ns):
    if ns.beta <= 0:
        raise ValidationError(f"beta must be positive, got {ns.beta}")
    ProfileParams(ns.a, ns.beta + 1 / 3, 1.0)
    return calibrate(ns.a, ns.beta, _config(ns), ns.tol)


def cmd_calibrate(ns, out):
    res = _calibrated(ns)
    io.write_csv(out / "g.csv", ("s", "g", "gp"), [res.profile.s, res.profile.q, res.profile.qp])
    io.write_json(out / "result.json", res.record())
    print(f"calibrate: A_beta={res.A_beta:.15g} Q={res.Q_at_A:.15g} mass={res.mass:.15g} "
          f"({res.iterations} refinement steps)")
    return [out / "g.csv", out / "result.json"], {"terminated_by": res.profile.terminated_by.value}


def cmd_similarity(ns, out):
    if any(t <= 0 for t in ns.t) or not ns.t:
        raise ValidationError("all times must be positive")
    if ns.nx < 2 or ns.x_max <= 0:
        raise ValidationError("need nx >= 2 and x_max > 0")
    sim = SimilaritySolution.from_calibration(_calibrated(ns))
    x = np.linspace(-ns.x_max, ns.x_max, ns.nx)
    files = []
    for i, t in enumerate(ns.t):
        files.append(io.write_csv(out / f"u_t{i}.csv", ("x", "u"), [x, eval_u(sim, t, x)]))
    diag = delta_diagnostics(sim, ns.t)
    record = {
        "a": ns.a, "beta": ns.beta, "A_beta": sim.A_beta,
        "exponents": [str(v) for v in (sim.exponents.gamma, sim.exponents.kappa, sim.exponents.lam)],
        "times": [
            {"t": d.t, "file": f"u_t{i}.csv", "peak_height": d.peak_height,
             "half_width": d.half_width, "mass": mass(sim, d.t)}
            for i, d in enumerate(diag)
        ],
    }
    files.append(io.write_json(out / "diagnostics.json", record))
    for d in diag:
        print(f"t={d.t:.6g}: peak={d.peak_height:.12g} half_width={d.half_width:.12g}")
    return files, {"terminated_by": sim.g.terminated_by.value}


def cmd_validate_pde(ns, out):
    if not ns.t_end > ns.t0 > 0:
        raise ValidationError("need t_end > t0 > 0")
    sim = SimilaritySolution.from_calibration(_calibrated(ns))
    wanted = sorted(ns.snapshots)
    files = []

    def snap(state):
        while wanted and state.t >= wanted[0]:
            t = wanted.pop(0)
            files.append(io.write_csv(out / f"u_snapshot_{len(files)}.csv", ("x", "u"),
                                      [state.grid.x, state.u]))
            print(f"snapshot at t={state.t:.6g} (requested {t:g})")

    rep = validate_against_similarity(sim, ns.n, ns.x_max, ns.t0, ns.t_end, ns.cfl, observe=snap)
    files.append(io.write_json(out / "report.json", rep.record()))
    print(f"validate-pde: final sup-norm relative error {rep.final_error:.3e}, "
          f"max mass deviation {rep.max_mass_deviation:.3e}, {rep.steps} steps")
    return files, {"final_error": rep.final_error, "max_mass_deviation": rep.max_mass_deviation}


def cmd_check_bounds(ns, out):
    cfg = _config(ns)
    params = [ProfileParams(a, mu, A) for a in ns.a for mu in ns.mu for A in ns.A]
    reports = sweep(params, cfg)
    path = io.write_json(out / "bounds.json", [r.record() for r in reports])
    print(f"{'a':>6} {'mu':>6} {'A':>8}  {'checks':>6}  result")
    for r in reports:
        p = r.params
        verdict = "pass" if r.satisfied else "FAIL: " + ", ".join(c.name for c in r.failures())
        print(f"{p.a:>6g} {p.mu:>6g} {p.A:>8g}  {len(r.checks):>6}  {verdict}")
    ok = all(r.satisfied for r in reports)
    if not ok:
        raise NumericalError("at least one bound check failed; see bounds.json")
    return [path], {"all_satisfied": ok}


COMMANDS = {
    "profile": cmd_profile,
    "calibrate": cmd_calibrate,
    "similarity": cmd_similarity,
    "validate-pde": cmd_validate_pde,
    "check-bounds": cmd_check_bounds,
}


def _fail(category: str, exc: BaseException, code: int) -> int:
    print(json.dumps({"error": category, "type": type(exc).__name__, "message": str(exc)}),
          file=sys.stderr)
    return code


def run(argv=None) -> int:
    """Parse ``argv``, dispatch, and return the process exit code."""
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        out = io.resolve_out_dir(ns.out_dir, ns.command)
        files, status = COMMANDS[ns.command](ns, out)
        io.write_manifest(out, ns.command, _inputs(ns), files, status)
    except ValidationError as exc:
        return _fail("validation", exc, EXIT_VALIDATION)
    except (NumericalError, SelfSimError, FloatingPointError) as exc:
        return _fail("numerical", exc, EXIT_NUMERICAL)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
