import numpy as np
import pytest

from analogbf.optimizer import Scenario

BAND_28 = (27.5e9, 28.35e9)
BAND_60 = (57e9, 66e9)

# filled by test_acceptance; echoed once at the end of the session
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def sc28():
    return Scenario.from_cn(*BAND_28, np.radians(60.0), 1e8)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
