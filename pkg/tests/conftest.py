import pytest
from hypothesis import HealthCheck, settings

from gammaspaces.grids import make_log_grid

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=30,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def grid():
    return make_log_grid()


@pytest.fixture(scope="session")
def coarse_grid():
    return make_log_grid(cells=200)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
