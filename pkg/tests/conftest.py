import os

import pytest
from hypothesis import HealthCheck, settings

from corridor_thz.analysis import AnalysisConfig, analyze
from corridor_thz.dataio import load_scenario
from corridor_thz.scenario import SOUNDER_GRID, preset
from corridor_thz.synthesis import free_space, synthesize

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=400, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# Acceptance lines collected by tests/test_acceptance.py, echoed at the end.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def grid():
    return SOUNDER_GRID


@pytest.fixture(scope="session")
def citic_ctf(grid):
    return synthesize(preset("citic"), grid)


@pytest.fixture(scope="session")
def cetic_ctf(grid):
    return synthesize(preset("cetic"), grid)


@pytest.fixture(scope="session")
def citic_los_ctf(grid):
    return synthesize(free_space(preset("citic")), grid)


@pytest.fixture(scope="session")
def joint_report(citic_ctf, cetic_ctf):
    return analyze([citic_ctf, cetic_ctf], preset("citic").antenna, AnalysisConfig())


@pytest.fixture(scope="session")
def scenario_files():
    return {name: load_scenario(name) for name in ("citic", "cetic")}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
