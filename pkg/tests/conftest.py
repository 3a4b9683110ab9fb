import numpy as np
import pytest

from qrlab.mapdsl import Box, fixture


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def branch1():
    return fixture("branch", eps=1.0)


@pytest.fixture(scope="session")
def noninj1():
    return fixture("noninj", M=1)


@pytest.fixture
def unit_box():
    return Box(-1, 1, -1, 1)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
