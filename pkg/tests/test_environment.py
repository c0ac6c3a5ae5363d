import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tethersim import environment as env
from tethersim.environment import CurrentParams, Hull, WaveParams, WindParams
from tethersim.errors import UnknownPreset
from tethersim.vehicles import asv_defaults, auv_defaults


def test_wave_force_magnitude_round_numbers():
    wave = WaveParams(amplitude=0.1, wavelength=2 * math.pi)
    f = env.wave_force_magnitude(1025.0, 9.81, Hull(1.0, 2.0, 0.5), wave)
    assert f == pytest.approx(1025 * 9.81 * 1 * 2 * 0.5 * 0.1, rel=1e-12)
    assert f == pytest.approx(1005.5, abs=0.05)


def test_zero_amplitude_gives_zero_force():
    assert env.wave_force_magnitude(1025, 9.81, Hull(1, 2, 0.5), WaveParams(0.0)) == 0.0


def test_wave_force_direction_and_phase():
    hull = Hull(1.0, 2.0, 0.5)
    wave = WaveParams(amplitude=0.1, wavelength=2 * math.pi)
    mag = env.wave_force_magnitude(1025, 9.81, hull, wave)
    np.testing.assert_allclose(env.wave_force(0.0, 1025, 9.81, hull, wave), 0.0, atol=1e-12)
    t_peak = (math.pi / 2) / wave.omega
    np.testing.assert_allclose(env.wave_force(t_peak, 1025, 9.81, hull, wave), [mag, 0, 0], rtol=1e-12)
    diag = WaveParams(amplitude=0.1, wavelength=2 * math.pi, direction=math.pi / 4)
    f = env.wave_force(t_peak, 1025, 9.81, hull, diag)
    assert abs(f[0] - f[1]) < 1e-12


def test_deep_water_frequency():
    assert env.deep_water_frequency(20.0) == pytest.approx(math.sqrt(9.81 * 2 * math.pi / 20.0))


def test_wind_force_round_numbers():
    wind = WindParams(speed=10.0, cx=0.8, frontal_area=0.5, cy=0.9, lateral_area=1.0)
    f = env.wind_force(wind, 0.0)
    assert np.linalg.norm(f) == pytest.approx(0.5 * 1.225 * 100 * 0.8 * 0.5, rel=1e-12)
    assert np.linalg.norm(f) == pytest.approx(24.5)
    np.testing.assert_array_equal(env.wind_force(WindParams(speed=0.0, cx=1, frontal_area=1), 0.3), 0.0)


def test_wind_beam_on_uses_lateral_terms():
    wind = WindParams(speed=10.0, direction=math.pi / 2, cx=0.8, frontal_area=0.5, cy=0.9,
                      lateral_area=1.0)
    f = env.wind_force(wind, 0.0)
    np.testing.assert_allclose(f, [0, 0.5 * 1.225 * 100 * 0.9 * 1.0, 0], atol=1e-12)


def test_current_zero_angles():
    np.testing.assert_allclose(env.current_velocity(CurrentParams(0.7)), [0.7, 0, 0])
    np.testing.assert_array_equal(env.current_velocity(CurrentParams(0.0, 0.3, 0.2)), 0.0)


@given(st.floats(0, 3), st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi))
def test_current_magnitude(speed, attack, sideslip):
    v = env.current_velocity(CurrentParams(speed, attack, sideslip))
    assert np.linalg.norm(v) == pytest.approx(speed, abs=1e-12)


def test_presets_match_reported_conditions():
    # wave height 3 / 4.5 as amplitude 1.5 / 2.25; wind 3 / 4.5 m/s; current 0.5 / 1.0 m/s
    moderate = env.sea_state_preset("Moderate")
    rough = env.sea_state_preset("rough")
    assert moderate.wave.height == 3.0
    assert moderate.wind.speed == 3.0
    assert moderate.current.speed == 0.5
    assert rough.wave.height == 4.5
    assert rough.wind.speed == 4.5
    assert rough.current.speed == 1.0


def test_unknown_preset():
    with pytest.raises(UnknownPreset):
        env.sea_state_preset("hurricane")


def test_depth_attenuation():
    wave = WaveParams(amplitude=1.0, wavelength=20.0)
    assert env.depth_attenuation(0.5, wave) == 1.0
    assert env.depth_attenuation(-20.0, wave) == pytest.approx(math.exp(-2 * math.pi))


def test_vehicle_disturbance_surface_and_submerged():
    sea = env.sea_state_preset("rough")
    t = 0.7
    asv, auv = asv_defaults(), auv_defaults()
    eta = np.array([0, 0, 0, 0, 0, 0.4])
    wind = WindParams(4.5, 0.0, env.RHO_AIR, asv.wind_cx, asv.wind_cy, asv.frontal_area,
                      asv.lateral_area)
    expected = env.wave_force(t, env.RHO_WATER, env.GRAVITY, asv.hull, sea.wave) + env.wind_force(wind, 0.4)
    np.testing.assert_allclose(env.vehicle_disturbance(sea, t, eta, asv), expected, rtol=1e-12)
    deep = np.array([0, 0, -3.0, 0, 0, 0])
    expected = env.wave_force(t, env.RHO_WATER, env.GRAVITY, auv.hull, sea.wave) * math.exp(
        -2 * math.pi * 3.0 / 30.0)
    np.testing.assert_allclose(env.vehicle_disturbance(sea, t, deep, auv), expected, rtol=1e-12)
