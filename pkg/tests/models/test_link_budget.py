"""
Test Received Power and Maximum Range
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weather_filter.models.attenuation import TuningCoefficients, WeatherCondition
from weather_filter.models.link_budget import (
    fov_map,
    free_space_range,
    lidar_received_power,
    predict_range,
    radar_received_power,
    sensor_attenuation,
    solve_max_range,
    SolverGrid,
)
from weather_filter.models.sensors import GainProfile, LidarSpec, RadarSpec, TargetSpec
from weather_filter.utils.exceptions import DomainError, ModelMisuseError

CLEAR_SKY = WeatherCondition()


def test_radar_power_value(radar, target):
    assert radar_received_power(radar, target, 0.0, 10.0) == pytest.approx(3.661105e-9, rel=1e-5)


def test_lidar_power_value(lidar, target):
    assert lidar_received_power(lidar, target, 0.0, 100.0) == pytest.approx(1.234e-7, rel=1e-3)


def test_power_follows_inverse_fourth_law(radar, lidar, target):
    assert radar_received_power(radar, target, 0.0, 10.0) / radar_received_power(radar, target, 0.0, 20.0) \
        == pytest.approx(16.0)
    assert lidar_received_power(lidar, target, 0.0, 10.0) / lidar_received_power(lidar, target, 0.0, 20.0) \
        == pytest.approx(16.0)


def test_power_is_vectorised(radar, target):
    distances = np.array([5.0, 10.0, 20.0])
    powers = radar_received_power(radar, target, 0.6, distances)
    assert powers.shape == (3, )
    assert powers[1] == pytest.approx(radar_received_power(radar, target, 0.6, 10.0))


def test_attenuation_lowers_power(radar, target):
    assert radar_received_power(radar, target, 10.0, 50.0) < radar_received_power(radar, target, 0.0, 50.0)


@pytest.mark.parametrize("distance", [0.0, -1.0, math.nan])
def test_power_rejects_bad_distance(radar, target, distance):
    with pytest.raises(DomainError):
        radar_received_power(radar, target, 0.0, distance)


@pytest.mark.parametrize(
    "sensor, expected", [
        (RadarSpec(), 52.0188),
        (RadarSpec(xi=1.0), 44.4539),
        (LidarSpec(), 187.4257),
    ]
)
def test_free_space_range(sensor, target, expected):
    assert free_space_range(sensor, target) == pytest.approx(expected, abs=1e-3)


@pytest.mark.parametrize("sensor", [RadarSpec(gamma_a_db=0.0), LidarSpec(gamma_a_db=0.0)])
def test_solver_matches_closed_form_without_attenuation(sensor, target):
    assert predict_range(sensor, target, CLEAR_SKY) == pytest.approx(free_space_range(sensor, target), abs=1e-3)


@settings(max_examples=100, deadline=None)
@given(
    p_t_w=st.floats(min_value=5e-3, max_value=2e-2),
    gain_dbi=st.floats(min_value=12.0, max_value=20.0),
    xi=st.floats(min_value=0.5, max_value=3.0),
    freq_hz=st.floats(min_value=60e9, max_value=80e9),
    p_n_w=st.floats(min_value=2e-12, max_value=1e-11),
    rcs_m2=st.floats(min_value=1.0, max_value=20.0),
)
def test_radar_solver_matches_fourth_root(p_t_w, gain_dbi, xi, freq_hz, p_n_w, rcs_m2):
    radar = RadarSpec(p_t_w=p_t_w, gain_dbi=gain_dbi, xi=xi, freq_hz=freq_hz, p_n_w=p_n_w, gamma_a_db=0.0)
    wavelength = 299792458.0 / freq_hz
    gain = 10**(gain_dbi / 10)
    expected = (p_t_w * xi * gain**2 * rcs_m2 * wavelength**2 / (4 * math.pi**3 * p_n_w))**0.25
    assert predict_range(radar, TargetSpec(rcs_m2=rcs_m2), CLEAR_SKY) == pytest.approx(expected, abs=1e-3)


@settings(max_examples=100, deadline=None)
@given(
    reflectance=st.floats(min_value=0.05, max_value=1.0),
    width_m=st.floats(min_value=0.2, max_value=0.6),
    transmission=st.floats(min_value=0.5, max_value=1.0),
    p_n_w=st.floats(min_value=1e-8, max_value=1e-7),
)
def test_lidar_solver_matches_fourth_root(reflectance, width_m, transmission, p_n_w):
    lidar = LidarSpec(transmission=transmission, p_n_w=p_n_w, gamma_a_db=0.0)
    target = TargetSpec(reflectance=reflectance, width_m=width_m)
    beam = lidar.q_v_rad * lidar.q_h_rad / 4 * (target.reflection_angle_rad / 2)**2
    numerator = reflectance * lidar.aperture_m2 * width_m * transmission**2 * lidar.p_t_w
    expected = (numerator / (math.pi**2 * beam * p_n_w))**0.25
    assert predict_range(lidar, target, CLEAR_SKY) == pytest.approx(expected, abs=1e-3)


def test_radar_clear_sky_range(radar, target):
    assert predict_range(radar, target, CLEAR_SKY) == pytest.approx(51.108, abs=1e-2)


def test_heavy_rain_shortens_radar_range(radar, target):
    rain = WeatherCondition(rain_rate=98.0)
    assert sensor_attenuation(radar, rain) == pytest.approx(30.9608, abs=1e-3)
    assert 27.0 <= predict_range(radar, target, rain) < 33.0


def test_fitted_coefficients_change_the_range(radar, target):
    rain = WeatherCondition(rain_rate=50.0)
    baseline = predict_range(radar, target, rain)
    fitted = predict_range(radar, target, rain, coeffs=TuningCoefficients(eta_rain=1.163))
    assert fitted < baseline


def test_zero_reflectance_is_undetectable(lidar):
    assert predict_range(lidar, TargetSpec(reflectance=0.0), CLEAR_SKY) is None


@pytest.mark.parametrize("factor", [0.5, 2.0, 16.0])
def test_xi_scales_range_by_fourth_root(target, factor):
    radar = RadarSpec(gamma_a_db=0.0)
    base = predict_range(radar, target, CLEAR_SKY)
    scaled = predict_range(radar, target, CLEAR_SKY, coeffs=TuningCoefficients(xi=factor))
    assert scaled / base == pytest.approx(factor**0.25, rel=1e-4)


def test_gamma_a_override_takes_precedence(target):
    assert sensor_attenuation(RadarSpec(gamma_a_db=0.0), CLEAR_SKY) == 0.0
    assert sensor_attenuation(RadarSpec(), CLEAR_SKY) == pytest.approx(0.6)


def test_solver_reaches_end_of_grid():
    grid = SolverGrid(gamma_max_m=50.0)
    assert solve_max_range(lambda d: 1.0 / np.asarray(d)**4, p_n=1e-12, grid=grid) == pytest.approx(50.0)


def test_solver_none_below_threshold():
    assert solve_max_range(lambda d: 1e-20 / np.asarray(d)**4, p_n=1e-12) is None


def test_solver_rejects_increasing_power():
    with pytest.raises(ModelMisuseError):
        solve_max_range(lambda d: np.asarray(d), p_n=1.0)


def test_solver_rejects_bad_threshold():
    with pytest.raises(DomainError):
        solve_max_range(lambda d: 1.0 / np.asarray(d)**4, p_n=0.0)


def test_solver_tolerance():
    grid = SolverGrid(step_m=0.5, xtol_m=1e-8)
    assert solve_max_range(lambda d: 1.0 / np.asarray(d)**4, p_n=1e-4, grid=grid) == pytest.approx(10.0, abs=1e-6)


@pytest.mark.parametrize(
    "kwargs", [
        dict(gamma_min_m=0.0),
        dict(step_m=0.0),
        dict(gamma_min_m=10.0, gamma_max_m=5.0),
        dict(xtol_m=-1.0),
    ]
)
def test_solver_grid_validation(kwargs):
    with pytest.raises(DomainError):
        SolverGrid(**kwargs)


def test_solver_grid_points():
    points = SolverGrid(gamma_min_m=1.0, gamma_max_m=2.0, step_m=0.25).points()
    np.testing.assert_allclose(points, [1.0, 1.25, 1.5, 1.75, 2.0])
    assert SolverGrid(step_m=0.5).tolerance == pytest.approx(0.005)


def test_fov_flat_profile_is_uniform(target):
    radar = RadarSpec(gain_profile=GainProfile.flat())
    ranges = fov_map(radar, target, CLEAR_SKY, psi_grid=[math.radians(p) for p in (-40.0, 0.0, 40.0)])
    values = [r for _, r in ranges]
    assert values[0] == pytest.approx(values[1])
    assert values[2] == pytest.approx(values[1])


def test_fov_gain_roll_off(target):
    profile = GainProfile(psi_deg=(-65.0, -40.0, 0.0, 40.0, 65.0), gain_db=(-6.0, -3.0, 0.0, -3.0, -6.0))
    radar = RadarSpec(gamma_a_db=0.0, gain_profile=profile)
    (_, at_40), (_, at_0) = fov_map(radar, target, CLEAR_SKY, psi_grid=[math.radians(40.0), 0.0])
    # gain enters twice, so -3 dB costs 6 dB of received power
    assert at_40 / at_0 == pytest.approx(10**(-6 / 40), rel=1e-4)


def test_fov_outside_field_of_view(radar, target):
    ranges = fov_map(radar, target, CLEAR_SKY, psi_grid=[math.radians(70.0), math.radians(-70.0)])
    assert [r for _, r in ranges] == [None, None]
    assert predict_range(radar, target, CLEAR_SKY, psi=math.radians(70.0)) is None


def test_fov_rejects_lidar(lidar, target):
    with pytest.raises(DomainError):
        fov_map(lidar, target, CLEAR_SKY, psi_grid=[0.0])


def test_gain_profile_csv_round_trip(tmp_path):
    profile = GainProfile(psi_deg=(-30.0, 0.0, 30.0), gain_db=(-2.0, 0.0, -2.5))
    path = str(tmp_path / 'gain.csv')
    profile.to_csv(path)
    assert GainProfile.from_csv(path) == profile


@pytest.mark.parametrize(
    "psi_deg, gain_db", [
        ((-70.0, 0.0, 30.0), (-1.0, 0.0, -1.0)),
        ((-30.0, 0.0, 30.0), (-1.0, 1.0, -1.0)),
        ((10.0, 30.0), (0.0, -1.0)),
        ((0.0, -10.0), (0.0, -1.0)),
    ]
)
def test_gain_profile_validation(psi_deg, gain_db):
    with pytest.raises(DomainError):
        GainProfile(psi_deg=psi_deg, gain_db=gain_db)


@pytest.mark.parametrize(
    "cls, kwargs", [
        (RadarSpec, dict(p_t_w=0.0)),
        (RadarSpec, dict(m_min=0)),
        (RadarSpec, dict(gamma_a_db=-1.0)),
        (LidarSpec, dict(transmission=1.5)),
        (LidarSpec, dict(wavelength_m=0.0)),
        (TargetSpec, dict(reflectance=1.2)),
        (TargetSpec, dict(rcs_m2=0.0)),
        (TargetSpec, dict(reflection_angle_rad=0.0)),
    ]
)
def test_spec_validation(cls, kwargs):
    with pytest.raises(DomainError):
        cls(**kwargs)


@settings(max_examples=20, deadline=None)
@given(
    r1=st.floats(min_value=0.0, max_value=150.0),
    r2=st.floats(min_value=0.0, max_value=150.0),
)
def test_range_never_grows_with_rain(r1, r2):
    lo, hi = sorted((r1, r2))
    radar, target = RadarSpec(), TargetSpec()
    near = predict_range(radar, target, WeatherCondition(rain_rate=hi))
    far = predict_range(radar, target, WeatherCondition(rain_rate=lo))
    assert near <= far + 1e-9


@settings(max_examples=20, deadline=None)
@given(
    v1=st.floats(min_value=1.0, max_value=1e4),
    v2=st.floats(min_value=1.0, max_value=1e4),
)
def test_lidar_range_never_shrinks_with_visual_range(v1, v2):
    lo, hi = sorted((v1, v2))
    lidar, target = LidarSpec(), TargetSpec()
    near = predict_range(lidar, target, WeatherCondition(fog_visual_range=lo))
    far = predict_range(lidar, target, WeatherCondition(fog_visual_range=hi))
    assert (near or 0.0) <= (far or 0.0) + 1e-9
