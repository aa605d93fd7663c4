"""
Received power of radar and lidar and the maximum detection range derived from it.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import bisect

from weather_filter.models.attenuation import (
    AttenuationParams,
    fog_attenuation,
    rain_attenuation,
    SensorKind,
    total_attenuation,
    TuningCoefficients,
    WeatherCondition,
)
from weather_filter.models.sensors import LidarSpec, RadarSpec, SensorSpec, TargetSpec
from weather_filter.utils.exceptions import DomainError, ModelMisuseError

log = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]
PowerFn = Callable[[ArrayLike], ArrayLike]


@dataclass(frozen=True)
class SolverGrid:
    """
    Search grid for the maximum range in meters.

    ``xtol_m`` is the bisection tolerance between two grid points, ``step_m / 100`` when unset.
    """
    gamma_min_m: float = 0.1
    gamma_max_m: float = 300.0
    step_m: float = 0.01
    xtol_m: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.gamma_min_m > 0:
            raise DomainError(f'gamma_min_m must be > 0, got {self.gamma_min_m}')
        if not self.step_m > 0:
            raise DomainError(f'step_m must be > 0, got {self.step_m}')
        if not self.gamma_max_m > self.gamma_min_m:
            raise DomainError(f'gamma_max_m must exceed gamma_min_m, got {self.gamma_max_m}')
        if self.xtol_m is not None and not self.xtol_m > 0:
            raise DomainError(f'xtol_m must be > 0, got {self.xtol_m}')

    @property
    def tolerance(self) -> float:
        return self.xtol_m if self.xtol_m is not None else self.step_m / 100

    def points(self) -> np.ndarray:
        num = int(round((self.gamma_max_m - self.gamma_min_m) / self.step_m)) + 1
        return np.linspace(self.gamma_min_m, self.gamma_min_m + (num - 1) * self.step_m, num)


def _check_distance(distance: ArrayLike) -> np.ndarray:
    distance = np.asarray(distance, dtype=float)
    if np.any(~(distance > 0)):
        raise DomainError('detection range must be > 0')
    return distance


def _path_loss(gamma: float, distance: np.ndarray) -> np.ndarray:
    return 10**(-gamma * distance / 1000)


def radar_received_power(
    spec: RadarSpec,
    target: TargetSpec,
    gamma: float,
    distance: ArrayLike,
    psi: float = 0.0,
    xi: Optional[float] = None,
) -> ArrayLike:
    """
    Received radar power in watts for a target at ``distance`` meters and azimuth ``psi`` radians.

    Args:
        spec: radar hardware
        target: target with its radar cross section
        gamma: overall attenuation
        distance: range in meters, scalar or array
        psi: azimuth, the power is zero outside the field of view
        xi: offset calibration, defaults to ``spec.xi``

    Example:

        >>> power = radar_received_power(RadarSpec(), TargetSpec(), gamma=0.0, distance=10.0)
        >>> f'{power:.4e}'
        '3.6611e-09'
    """
    distance = _check_distance(distance)
    xi = spec.xi if xi is None else xi
    gain = spec.linear_gain(psi)
    numerator = spec.p_t_w * xi * gain**2 * target.rcs_m2 * spec.wavelength_m**2
    power = _path_loss(gamma, distance) * numerator / (4 * math.pi**3 * distance**4)
    return power if power.ndim else float(power)


def lidar_received_power(spec: LidarSpec, target: TargetSpec, gamma: float, distance: ArrayLike) -> ArrayLike:
    """
    Received lidar power in watts for a target at ``distance`` meters.

    Example:

        >>> power = lidar_received_power(LidarSpec(), TargetSpec(), gamma=0.0, distance=100.0)
        >>> f'{power:.4e}'
        '1.2340e-07'
    """
    distance = _check_distance(distance)
    numerator = target.reflectance * spec.aperture_m2 * target.width_m * spec.transmission**2 * spec.p_t_w
    beam = spec.q_v_rad * spec.q_h_rad / 4 * (target.reflection_angle_rad / 2)**2
    power = _path_loss(gamma, distance) * numerator / (math.pi**2 * distance**4 * beam)
    return power if power.ndim else float(power)


def solve_max_range(power_fn: PowerFn, p_n: float, grid: Optional[SolverGrid] = None) -> Optional[float]:
    """
    Largest range at which ``power_fn`` still meets the detection threshold ``p_n``.

    The grid is scanned for the last point satisfying ``power >= p_n``, then the crossing towards the next grid point
    is refined by bisection. Returns ``None`` when even the first grid point fails.

    Example:

        >>> round(solve_max_range(lambda d: 1.0 / np.asarray(d)**4, p_n=1e-4, grid=SolverGrid(gamma_max_m=50.0)), 3)
        10.0
        >>> solve_max_range(lambda d: 0.0 * np.asarray(d), p_n=1e-12) is None
        True
    """
    grid = grid or SolverGrid()
    if not p_n > 0:
        raise DomainError(f'detection threshold must be > 0, got {p_n}')
    points = grid.points()
    power = np.broadcast_to(np.asarray(power_fn(points), dtype=float), points.shape)
    if np.any(np.diff(power) > 0):
        raise ModelMisuseError('received power must be non-increasing in range on the solver grid')

    detected = np.flatnonzero(power >= p_n)
    if detected.size == 0:
        return None
    last = int(detected[-1])
    if last == points.size - 1:
        log.debug('detection reaches the end of the solver grid at %.2f m', points[last])
        return float(points[last])

    lo, hi = float(points[last]), float(points[last + 1])
    if power[last] == p_n:
        return lo
    crossing = bisect(lambda d: float(power_fn(d)) - p_n, lo, hi, xtol=grid.tolerance)
    return float(crossing)


def sensor_attenuation(
    sensor: SensorSpec,
    condition: WeatherCondition,
    params: Optional[AttenuationParams] = None,
    coeffs: Optional[TuningCoefficients] = None,
) -> float:
    """Overall attenuation seen by ``sensor`` under ``condition``."""
    params = params or AttenuationParams()
    coeffs = coeffs or TuningCoefficients.baseline()
    wavelength = sensor.wavelength_m
    gamma_r = rain_attenuation(sensor.kind, condition.rain_rate, params, coeffs.eta_rain)
    gamma_f = fog_attenuation(sensor.kind, condition.fog_visual_range, params, wavelength, coeffs.eta_fog)
    gamma_a = params.gamma_a(sensor.kind) if sensor.gamma_a_db is None else sensor.gamma_a_db
    return total_attenuation(gamma_r, gamma_f, gamma_a)


def power_function(
    sensor: SensorSpec,
    target: TargetSpec,
    gamma: float,
    coeffs: Optional[TuningCoefficients] = None,
    psi: float = 0.0,
) -> PowerFn:
    """Received power of ``sensor`` as a function of range only."""
    coeffs = coeffs or TuningCoefficients.baseline()
    if sensor.kind is SensorKind.RADAR:
        xi = sensor.xi * coeffs.xi
        return lambda distance: radar_received_power(sensor, target, gamma, distance, psi=psi, xi=xi)
    return lambda distance: lidar_received_power(sensor, target, gamma, distance)


def predict_range(
    sensor: SensorSpec,
    target: TargetSpec,
    condition: WeatherCondition,
    params: Optional[AttenuationParams] = None,
    coeffs: Optional[TuningCoefficients] = None,
    grid: Optional[SolverGrid] = None,
    psi: float = 0.0,
) -> Optional[float]:
    """
    Maximum detection range in meters of ``target`` under ``condition``.

    Baseline coefficients give the physical model alone, fitted ones the weather filter.
    For radar, the effective offset calibration is ``sensor.xi * coeffs.xi``.

    Example:

        >>> round(predict_range(RadarSpec(), TargetSpec(), WeatherCondition()), 1)
        51.1
    """
    gamma = sensor_attenuation(sensor, condition, params, coeffs)
    return solve_max_range(power_function(sensor, target, gamma, coeffs, psi), sensor.p_n_w, grid)


def free_space_range(sensor: SensorSpec, target: TargetSpec, coeffs: Optional[TuningCoefficients] = None) -> float:
    """Closed-form range without any attenuation, ``(P(1 m) / P_n) ** (1 / 4)``."""
    return (power_function(sensor, target, 0.0, coeffs)(1.0) / sensor.p_n_w)**0.25


def fov_map(
    spec: RadarSpec,
    target: TargetSpec,
    condition: WeatherCondition,
    params: Optional[AttenuationParams] = None,
    coeffs: Optional[TuningCoefficients] = None,
    psi_grid: Sequence[float] = (),
    grid: Optional[SolverGrid] = None,
) -> List[Tuple[float, Optional[float]]]:
    """
    Maximum range per azimuth in radians. Angles outside the field of view map to ``None``.

    The angular gain is the same for every weather condition, only the attenuation changes.
    """
    if spec.kind is not SensorKind.RADAR:
        raise DomainError('the field of view map applies to radar only, lidar covers the full circle')
    gamma = sensor_attenuation(spec, condition, params, coeffs)
    result = []
    for psi in psi_grid:
        if spec.linear_gain(psi) == 0:
            result.append((psi, None))
            continue
        power_fn = power_function(spec, target, gamma, coeffs, psi)
        result.append((psi, solve_max_range(power_fn, spec.p_n_w, grid)))
    return result
