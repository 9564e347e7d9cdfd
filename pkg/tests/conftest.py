import numpy as np
import pytest

from kp2asym.scattering import gaussian_family

ACCEPTANCE: dict[int, str] = {}


@pytest.fixture(scope="session")
def std_family():
    """Standard family: restriction ratio 0.5, centre on the imaginary axis."""
    return gaussian_family(1 / np.sqrt(np.pi), 0.3j)


@pytest.fixture(scope="session")
def centred_family():
    return gaussian_family(1 / np.sqrt(np.pi), 0j)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
