import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from statdisc.quadric import validate_quadric

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


@pytest.fixture
def scalar_q():
    return validate_quadric([[[1.0]]])


@pytest.fixture
def split_q():
    return validate_quadric([np.eye(2), np.diag([1.0, -1.0])])


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
