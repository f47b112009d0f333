import pytest

from srs_whitham.core import PhysicalParams, derive_spectral_constants
from srs_whitham.elliptic import build_frame
from srs_whitham.gfun import trace_band
from srs_whitham.whitham import solve_genus1


@pytest.fixture(scope="session")
def c():
    return derive_spectral_constants(PhysicalParams(l=-0.5, omega=0.5))


@pytest.fixture(scope="session")
def gp3(c):
    return solve_genus1(3.0, c)


@pytest.fixture(scope="session")
def band3(gp3, c):
    return trace_band(gp3, c)


@pytest.fixture(scope="session")
def frame3(c, gp3):
    return build_frame(3.0, c, gp=gp3)


# one summary line per acceptance criterion, filled by tests/test_acceptance.py
ACCEPTANCE_LINES = {}


@pytest.fixture
def acceptance_report():
    def record(number, checks):
        ok = all(c[1] for c in checks)
        detail = "; ".join(f"{name}: {info}{'' if good else ' [FAIL]'}" for name, good, info in checks)
        ACCEPTANCE_LINES[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  ({detail})"
        print(ACCEPTANCE_LINES[number])
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
