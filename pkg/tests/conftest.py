
import pytest

from replicator_selfsim import SolverConfig, calibrate, solve_profile
from replicator_selfsim.bounds_checker import default_sweep

ACCEPTANCE_LINES = []


def record_acceptance(number, title, passed, detail=""):
    ACCEPTANCE_LINES.append((number, title, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE_LINES):
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{verdict}] criterion {number}: {title} {detail}".rstrip())


@pytest.fixture(scope="session")
def sweep_solutions():
    """Default-config solves for the 27-point sweep, keyed by (a, mu, A)."""
    return {(p.a, p.mu, p.A): solve_profile(p) for p in default_sweep()}


@pytest.fixture(scope="session")
def sweep_solutions_tight():
    cfg = SolverConfig().tightened()
    return {(p.a, p.mu, p.A): solve_profile(p, cfg) for p in default_sweep()}


@pytest.fixture(scope="session")
def calibrated_11():
    return calibrate(1.0, 1.0)


@pytest.fixture(scope="session")
def similarity_11(calibrated_11):
    from replicator_selfsim import SimilaritySolution

    return SimilaritySolution.from_calibration(calibrated_11)
