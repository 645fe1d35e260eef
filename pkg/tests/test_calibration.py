import dataclasses

import pytest

from replicator_selfsim import (
    BracketFailure,
    NoConvergence,
    ProfileParams,
    Q_of_A,
    SolverConfig,
    ValidationError,
    calibrate,
    functionals,
    solve_profile,
)
from replicator_selfsim import calibration
from replicator_selfsim.profile_ode import midpoint_residuals


def test_small_amplitude_limit_ordering():
    q4, q2, q0 = (Q_of_A(1.0, 1.0, A) for A in (1e-4, 1e-2, 1.0))
    assert q4 < q2 < 1e-2 * q0


def test_large_amplitude_limit_ordering():
    assert Q_of_A(1.0, 1.0, 100.0) > Q_of_A(1.0, 1.0, 10.0) > Q_of_A(1.0, 1.0, 1.0)


@pytest.mark.parametrize("A", [0.3, 1.0, 3.0])
def test_consistent_with_mass_integral(A):
    Q = Q_of_A(1.0, 1.0, A)
    fv = functionals(solve_profile(ProfileParams(1.0, 4 / 3, A)))
    assert Q / (1.0 * fv.I) == pytest.approx(1.0, abs=1e-6)


def test_calibrated_unit_mass(calibrated_11):
    r = calibrated_11
    assert abs(r.Q_at_A - 1.0) <= 1e-8
    assert abs(r.mass - 1.0) < 1e-6
    assert r.bracket[0] < r.A_beta < r.bracket[1]
    assert r.profile.params.mu == 1.0 + 1 / 3
    assert r.profile.params.A == r.A_beta


def test_distinct_targets_give_distinct_amplitudes():
    lo, hi = calibrate(1.0, 0.5), calibrate(1.0, 2.0)
    assert lo.A_beta != hi.A_beta
    assert abs(lo.Q_at_A - 0.5) / 0.5 <= 1e-8
    assert abs(hi.Q_at_A - 2.0) / 2.0 <= 1e-8


def test_profile_equation_residual(calibrated_11):
    # with mu = K + (a/2) Lam + 1/3 the profile equation reduces to the ODE
    g = calibrated_11.profile
    params = dataclasses.replace(g.params, mu=calibrated_11.Q_at_A + 1 / 3)
    res = midpoint_residuals(dataclasses.replace(g, params=params))
    assert res.max() <= 100 * g.config.rel_tol


@pytest.mark.parametrize("A", [0.25, 2.0])
def test_continuity_probe(A):
    base = Q_of_A(1.0, 1.0, A)
    diffs = [abs(Q_of_A(1.0, 1.0, A * (1 + h)) - base) for h in (1e-1, 1e-2, 1e-3)]
    assert diffs[0] > diffs[1] > diffs[2]


def test_rerun_bit_identical(calibrated_11):
    again = calibrate(1.0, 1.0)
    assert again.A_beta == calibrated_11.A_beta
    assert again.bracket == calibrated_11.bracket


def test_bracket_failure(monkeypatch):
    monkeypatch.setattr(calibration, "MAX_EXPANSIONS", 5)
    monkeypatch.setattr(calibration, "_evaluate", lambda a, b, A, cfg: (7.0, None, None))
    with pytest.raises(BracketFailure):
        calibrate(1.0, 1.0)


def test_no_convergence(monkeypatch):
    monkeypatch.setattr(calibration, "MAX_ITER", 1)
    with pytest.raises(NoConvergence):
        calibrate(1.0, 1.0, SolverConfig(rel_tol=1e-6, abs_tol=1e-8), tol=1e-14)


@pytest.mark.parametrize("kw", [dict(a=0.0, beta=1.0), dict(a=1.0, beta=-1.0),
                                dict(a=1.0, beta=1.0, tol=0.0)])
def test_invalid_inputs(kw):
    with pytest.raises(ValidationError):
        calibrate(**kw)
