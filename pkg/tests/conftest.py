import numpy as np
import pytest

from kappamap.jet import backends

ACCEPTANCE_LINES = []


@pytest.fixture(params=[name for name, _ in backends()])
def jet_cls(request):
    return dict(backends())[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
