import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ringratchet import (DriveParams, InvalidArgument, NumericsConfig,
                         ThreeModeState, drive_potential, ews_state,
                         make_two_mode_state, mode_populations, state_to_field)
from ringratchet.gp import field_to_state
from ringratchet.model import grid


def test_ews_amplitudes():
    s = make_two_mode_state(0.5, 0.5, 0.0)
    assert s.A == pytest.approx(1 / math.sqrt(2))
    assert s.B == pytest.approx(1 / math.sqrt(2))
    assert s.C == 0


def test_uews_amplitudes():
    s = make_two_mode_state(0.7, 0.3, 0.0)
    assert s.A == pytest.approx(math.sqrt(0.7))
    assert s.B == pytest.approx(math.sqrt(0.3))
    assert s.C == 0


def test_single_mode_limit():
    s = make_two_mode_state(1.0, 0.0)
    assert (s.A, s.B, s.C) == (1, 0, 0)


def test_relative_phase_rides_on_mode_minus1():
    s = make_two_mode_state(0.5, 0.5, math.pi / 2)
    assert s.A == pytest.approx(1j / math.sqrt(2))
    assert s.B.imag == 0


@pytest.mark.parametrize("w", [(0.6, 0.5), (0.5, 0.4999)])
def test_weights_must_sum_to_one(w):
    with pytest.raises(InvalidArgument):
        make_two_mode_state(*w)


def test_negative_weight_rejected():
    with pytest.raises(InvalidArgument):
        make_two_mode_state(1.5, -0.5)


@given(st.floats(0, 1), st.floats(-10, 10))
def test_constructed_states_have_exact_unit_norm(w, phase):
    s = make_two_mode_state(w, 1.0 - w, phase)
    assert abs(s.norm - 1.0) < 1e-15


def test_ews_field_matches_closed_form():
    x = grid(256)
    field = state_to_field(ews_state(), 256)
    expected = (1 + np.exp(-1j * x)) / math.sqrt(4 * math.pi)
    np.testing.assert_allclose(field.samples, expected, atol=1e-15)
    assert abs(field.norm - 1) < 1e-12


def test_zero_mode_field_is_constant():
    field = state_to_field(ThreeModeState(0, 1, 0), 64)
    np.testing.assert_allclose(field.samples, 1 / math.sqrt(2 * math.pi), atol=1e-15)


def test_plus_one_round_trip():
    field = state_to_field(ThreeModeState(0, 0, 1), 32)
    np.testing.assert_allclose(field.samples, np.exp(1j * grid(32)) / math.sqrt(2 * math.pi),
                               atol=1e-15)
    pops = mode_populations(field, 1)
    np.testing.assert_allclose(pops, [0, 0, 1], atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=6, max_size=6),
       st.sampled_from([16, 32, 64, 256, 1024]))
def test_projection_inverts_state_to_field(parts, n):
    z = np.array(parts[:3]) + 1j * np.array(parts[3:])
    if np.linalg.norm(z) < 1e-3:
        return
    s = ThreeModeState.from_array(z / np.linalg.norm(z))
    back = field_to_state(state_to_field(s, n))
    np.testing.assert_allclose(back.as_array(), s.as_array(), atol=1e-12)


def test_drive_potential_values():
    p = DriveParams(0.1, 2.0, 10.0)
    assert drive_potential(math.pi / 2, 0.0, p) == 0
    assert drive_potential(math.pi / 2, math.pi / 20, p) == pytest.approx(2.0)


@given(st.floats(0, 100))
def test_drive_has_zero_spatial_mean(t):
    p = DriveParams(0.0, 2.0, 10.0)
    x = grid(128)
    assert abs(np.mean(drive_potential(x, t, p))) < 1e-14


@given(st.floats(-10, 10), st.floats(0, 50), st.floats(0.5, 30))
def test_drive_symmetries(x, t, omega):
    p = DriveParams(0.0, 1.5, omega)
    v = drive_potential(x, t, p)
    assert drive_potential(-x, t, p) == pytest.approx(-v, abs=1e-12)
    assert drive_potential(x, t + math.pi / omega, p) == pytest.approx(-v, abs=1e-9)


@pytest.mark.parametrize("kwargs", [dict(omega=0), dict(g=-0.1), dict(K=float("inf")),
                                    dict(omega=float("nan"))])
def test_drive_params_validation(kwargs):
    with pytest.raises(InvalidArgument):
        DriveParams(**{"g": 0.1, "K": 2.0, "omega": 10.0, **kwargs})


@pytest.mark.parametrize("kwargs", [dict(grid_points=8), dict(grid_points=100),
                                    dict(steps_per_period=99), dict(horizon_periods=0),
                                    dict(sample_stride=0)])
def test_numerics_config_validation(kwargs):
    with pytest.raises(InvalidArgument):
        NumericsConfig(**kwargs)


def test_numerics_defaults():
    cfg = NumericsConfig()
    assert (cfg.grid_points, cfg.steps_per_period, cfg.sample_stride) == (256, 1000, 10)
    assert cfg.dt(DriveParams(0.1, 2, 10)) == pytest.approx(2 * math.pi / 10 / 1000)
