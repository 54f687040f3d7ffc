import math

import pytest

from nsp_wavelab.config import RunConfig
from nsp_wavelab.shock_profile import solve_profile
from nsp_wavelab.thermo import fan_from_mid, r1_velocity, s2_velocity, solve_riemann

# Closed-form canonical fan: v- = 1, u- = 0, v_m = 1.1, v+ = 1.2.
U_MID = math.sqrt(2.0) * math.log(1.1)
U_PLUS = U_MID - math.sqrt(0.1 * (2 / 1.1 - 2 / 1.2))
SIGMA = math.sqrt((2 / 1.1 - 2 / 1.2) / 0.1)


@pytest.fixture(scope="session")
def fan():
    return solve_riemann(1.0, 0.0, 1.2, U_PLUS)


@pytest.fixture(scope="session")
def shock_fan():
    """Pure 2-shock from v_m = 1.1 to v+ = 1.2 (no rarefaction)."""
    return solve_riemann(1.1, U_MID, 1.2, U_PLUS)


@pytest.fixture(scope="session")
def profile(fan):
    return solve_profile(fan)


@pytest.fixture(scope="session")
def shock_profile_only(shock_fan):
    return solve_profile(shock_fan)


def shock_fan_of_amplitude(delta_S, v_mid=1.1):
    return fan_from_mid(v_mid - 0.1, 0.0, v_mid, v_mid + delta_S)


_ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
