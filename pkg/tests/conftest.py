import numpy as np
import pytest

from pilotwave import Potential, WaveState, make_grid, split_step_evolve
from pilotwave.propagator import analytic_free_gaussian

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def grid():
    return make_grid(-30, 30, 2048)


@pytest.fixture(scope="session")
def gaussian(grid):
    """pi^-1/4 exp(-x^2/2) on the default grid."""
    return WaveState.scalar(grid, analytic_free_gaussian(grid.x, 0.0))


@pytest.fixture(scope="session")
def free_record(gaussian):
    """Free evolution to t = 5 stored every 0.01."""
    return split_step_evolve(gaussian, Potential.free(), 1e-3, 5000, 10)


def plane_wave(grid, k0):
    return WaveState.scalar(grid, np.exp(1j * k0 * grid.x) / np.sqrt(grid.length))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


_SCENARIO_CACHE: dict = {}


def run_cached(cfg):
    """Run a scenario once per distinct config for the whole session."""
    from pilotwave import run_scenario

    if cfg not in _SCENARIO_CACHE:
        _SCENARIO_CACHE[cfg] = run_scenario(cfg)
    return _SCENARIO_CACHE[cfg]


def default_config(scenario, **overrides):
    from pilotwave.config import build_config

    return build_config({"scenario": scenario, **overrides})
