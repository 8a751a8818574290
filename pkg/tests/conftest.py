import numpy as np
import pytest

from nonclassical import fock_state, superposition_family


@pytest.fixture
def vacuum():
    return fock_state(0, 4)


def max_abs_diff(a, b):
    d = max(a.dim, b.dim)
    return float(np.max(np.abs(a.padded(d).entries - b.padded(d).entries)))


@pytest.fixture
def diff():
    return max_abs_diff


@pytest.fixture(params=["consecutive", "skip", "equal", "geometric"])
def family_state(request):
    return superposition_family(request.param, 3, 10)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
