import numpy as np
import pytest

from ringratchet import DriveParams, NumericsConfig


@pytest.fixture
def headline_params():
    """g = 0.1, K = 2, omega = 10: the headline drive."""
    return DriveParams(0.1, 2.0, 10.0)


@pytest.fixture
def short_cfg():
    return NumericsConfig(grid_points=64, steps_per_period=200, horizon_periods=5,
                          sample_stride=10)


def random_state(rng):
    z = rng.normal(size=3) + 1j * rng.normal(size=3)
    return z / np.linalg.norm(z)


# Expensive results shared by the acceptance module and the slow analysis tests.

IF_GRID = np.round(np.arange(0.02, 0.2001, 0.01), 6)
IF_CFG = NumericsConfig(grid_points=128, steps_per_period=1000, horizon_periods=2000,
                        sample_stride=10)
BISECTION_CFG = NumericsConfig(grid_points=16, steps_per_period=1000, horizon_periods=2000,
                               sample_stride=10)

_ACCEPTANCE_LINES = {}


def report(number, ok, detail):
    _ACCEPTANCE_LINES[number] = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(_ACCEPTANCE_LINES[n])


@pytest.fixture(scope="session")
def g_critical():
    from ringratchet.analysis import find_transition
    return find_transition("g", 0.05, 0.2, DriveParams(), BISECTION_CFG, tol=2e-3)


@pytest.fixture(scope="session")
def if_scan():
    from ringratchet.analysis import instability_scan
    return IF_GRID, instability_scan(IF_GRID, DriveParams(), IF_CFG, 1e-5)


LONG_CFG = NumericsConfig(grid_points=256, steps_per_period=1000, horizon_periods=8000,
                          sample_stride=10)
_LONG_CACHE = {}


def _long_run(engine, g):
    """``(tac, max norm drift)`` for the EWS state over 8000 periods at K = 2, omega = 10."""
    from ringratchet import ews_state, gp_evolve, state_to_field, tmm_evolve
    from ringratchet.analysis import time_averaged_current
    key = (engine, float(g))
    if key not in _LONG_CACHE:
        params = DriveParams(g)
        if engine == "gp":
            traj = gp_evolve(state_to_field(ews_state(), LONG_CFG), params, LONG_CFG, n_max=1)
        else:
            traj = tmm_evolve(ews_state(), params, LONG_CFG)
        _LONG_CACHE[key] = (time_averaged_current(traj), float(np.max(np.abs(traj.norms - 1))))
    return _LONG_CACHE[key]


@pytest.fixture(scope="session")
def long_tac():
    """``long_tac(engine, g)``: memoised 8000-period TAC."""
    return lambda engine, g: _long_run(engine, g)[0]


@pytest.fixture(scope="session")
def long_norm_drift():
    return lambda engine, g: _long_run(engine, g)[1]
