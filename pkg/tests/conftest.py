import numpy as np
import pytest

from starweyl import OrderingKey
from starweyl.quadrature import default_grid

ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def grid():
    return default_grid()


@pytest.fixture(scope="session")
def weyl():
    return OrderingKey.weyl()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240611)


def max_abs(a, b=0.0) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
