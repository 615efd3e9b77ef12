import numpy as np
import pytest

from subnetsim import _kernels
from subnetsim.config import SimConfig


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def cfg30():
    return SimConfig(num_subnetworks=30, aps_per_subnetwork=20)


@pytest.fixture(params=sorted(_kernels.BACKENDS))
def backend(request):
    return _kernels.get_backend(request.param)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
