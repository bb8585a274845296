import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from stargen import PhaseGrid, SpatialGrid

settings.register_profile(
    "stargen",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.function_scoped_fixture, HealthCheck.too_slow],
)
settings.load_profile("stargen")


@pytest.fixture(scope="session")
def grid64():
    return PhaseGrid.compatible(SpatialGrid.centered(8.0, 64))


@pytest.fixture(scope="session")
def grid128():
    return PhaseGrid.compatible(SpatialGrid.centered(10.0, 128))


@pytest.fixture(scope="session")
def wide256():
    return PhaseGrid.compatible(SpatialGrid.centered(12.0, 256))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for text in lines:
            terminalreporter.write_line(text)
