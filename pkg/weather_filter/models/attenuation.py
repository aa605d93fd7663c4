"""
Rain, fog and atmospheric attenuation for radar and lidar sensors.

All attenuations are expressed in the same model-dB unit that the link budget consumes through its
``10 ** (-gamma * range / 1000)`` factor, so no unit conversion happens between the two.
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence

from weather_filter.utils.exceptions import DomainError

#: Fog visual range that stands for "no fog".
CLEAR: float = math.inf


class SensorKind(str, Enum):
    RADAR = 'radar'
    LIDAR = 'lidar'


@dataclass(frozen=True)
class WeatherCondition:
    """
    Rain rate in mm/h and fog visual range in meters, ``CLEAR`` meaning no fog.

    Example:

        >>> WeatherCondition(rain_rate=16.0)
        WeatherCondition(rain_rate=16.0, fog_visual_range=inf)
        >>> WeatherCondition(fog_visual_range=6.0).is_foggy
        True
    """
    rain_rate: float = 0.0
    fog_visual_range: float = CLEAR

    def __post_init__(self) -> None:
        if math.isnan(self.rain_rate) or self.rain_rate < 0:
            raise DomainError(f'rain_rate must be >= 0 mm/h, got {self.rain_rate}')
        if math.isnan(self.fog_visual_range) or self.fog_visual_range <= 0:
            raise DomainError(f'fog_visual_range must be > 0 m or CLEAR, got {self.fog_visual_range}')

    @property
    def is_foggy(self) -> bool:
        return math.isfinite(self.fog_visual_range)

    @property
    def is_clear(self) -> bool:
        return self.rain_rate == 0 and not self.is_foggy


@dataclass(frozen=True)
class AttenuationParams:
    """
    Physical constants of the rain and fog models.

    Defaults are the published values for a 77 GHz radar and a 905 nm lidar in dry continental fog.
    """
    k_radar: float = 1.1319
    alpha_radar: float = 0.7174
    b_radar: float = 3.1733
    k_lidar: float = 1.076
    alpha_lidar: float = 0.67
    q: float = 3.45e-2
    lambda_0_m: float = 550e-9
    c_f: float = 0.034
    gamma_a_radar_db: float = 0.6
    gamma_a_lidar_db: float = 0.03

    def __post_init__(self) -> None:
        for name, value in vars(self).items():
            if not math.isfinite(value):
                raise DomainError(f'attenuation parameter {name} must be finite, got {value}')
        for name in ('k_radar', 'k_lidar', 'b_radar', 'c_f', 'lambda_0_m'):
            if getattr(self, name) <= 0:
                raise DomainError(f'attenuation parameter {name} must be > 0, got {getattr(self, name)}')

    def rain_constants(self, kind: SensorKind) -> Dict[str, float]:
        kind = SensorKind(kind)
        if kind is SensorKind.RADAR:
            return {'k': self.k_radar, 'alpha': self.alpha_radar}
        return {'k': self.k_lidar, 'alpha': self.alpha_lidar}

    def gamma_a(self, kind: SensorKind) -> float:
        return self.gamma_a_radar_db if SensorKind(kind) is SensorKind.RADAR else self.gamma_a_lidar_db


@dataclass(frozen=True)
class TuningCoefficients:
    """
    Empirical coefficients of the weather filter for one sensor.

    ``xi`` scales the radar offset calibration and is ignored for lidar. All ones gives the baseline model.
    """
    eta_rain: float = 1.0
    eta_fog: float = 1.0
    xi: float = 1.0

    def __post_init__(self) -> None:
        for name, value in vars(self).items():
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f'tuning coefficient {name} must be finite and > 0, got {value}')

    @classmethod
    def baseline(cls) -> 'TuningCoefficients':
        return cls()

    @property
    def is_baseline(self) -> bool:
        return self == TuningCoefficients.baseline()


def fog_density(v: float, c_f: float) -> float:
    """
    Fog density derived from the visual range.

    Args:
        v: visual range in meters
        c_f: fog type parameter

    Example:

        >>> round(fog_density(6.0, 0.034), 10)
        0.0004265712
        >>> fog_density(0.034, 0.034)
        1.0
    """
    if not v > 0:
        raise DomainError(f'visual range must be > 0, got {v}')
    if not c_f > 0:
        raise DomainError(f'fog type parameter must be > 0, got {c_f}')
    return (c_f / v)**1.5


def rain_attenuation(
    sensor_kind: SensorKind, r: float, params: Optional[AttenuationParams] = None, eta_rain: float = 1.0
) -> float:
    """
    Rain attenuation ``eta * k * r ** alpha`` with ``(k, alpha)`` selected by sensor kind.

    Example:

        >>> round(rain_attenuation('radar', 16.0), 4)
        8.2726
        >>> rain_attenuation('lidar', 0.0, eta_rain=3.0)
        0.0
    """
    if math.isnan(r) or r < 0:
        raise DomainError(f'rain rate must be >= 0 mm/h, got {r}')
    params = params or AttenuationParams()
    if r == 0:
        return 0.0
    constants = params.rain_constants(sensor_kind)
    return eta_rain * constants['k'] * r**constants['alpha']


def fog_attenuation(
    sensor_kind: SensorKind,
    v: float,
    params: Optional[AttenuationParams] = None,
    wavelength_m: Optional[float] = None,
    eta_fog: float = 1.0,
) -> float:
    """
    Fog attenuation from the visual range ``v`` in meters.

    Radar follows the fog density model, lidar the visibility model ``17 / v`` with a wavelength correction
    relative to ``params.lambda_0_m``.

    Args:
        sensor_kind: ``radar`` or ``lidar``
        v: visual range in meters, ``CLEAR`` for no fog
        params: model constants
        wavelength_m: lidar wavelength, required for lidar
        eta_fog: empirical tuning coefficient

    Example:

        >>> round(fog_attenuation('lidar', 6.0, wavelength_m=905e-9), 4)
        2.7851
        >>> fog_attenuation('radar', CLEAR)
        0.0
    """
    if math.isnan(v) or v <= 0:
        raise DomainError(f'visual range must be > 0 m or CLEAR, got {v}')
    if math.isinf(v):
        return 0.0
    params = params or AttenuationParams()
    if SensorKind(sensor_kind) is SensorKind.RADAR:
        return eta_fog * params.b_radar * fog_density(v, params.c_f)
    if wavelength_m is None or not wavelength_m > 0:
        raise DomainError(f'lidar fog attenuation needs a wavelength > 0, got {wavelength_m}')
    return eta_fog * (17.0 / v) * (wavelength_m / params.lambda_0_m)**(-params.q)


def total_attenuation(gamma_r: float, gamma_f: float, gamma_a: float) -> float:
    """
    Overall attenuation as the sum of rain, fog and atmosphere.

    >>> total_attenuation(0.0, 0.0, 0.6)
    0.6
    """
    for name, value in (('gamma_r', gamma_r), ('gamma_f', gamma_f), ('gamma_a', gamma_a)):
        if math.isnan(value) or value < 0:
            raise DomainError(f'{name} must be >= 0, got {value}')
    return gamma_r + gamma_f + gamma_a


def attenuation_curve(
    sensor_kind: SensorKind,
    variable: str,
    values: Sequence[float],
    params: Optional[AttenuationParams] = None,
    coeffs: Optional[TuningCoefficients] = None,
    wavelength_m: Optional[float] = None,
    gamma_a: Optional[float] = None,
) -> List[Dict[str, float]]:
    """
    Attenuation components over a rain-rate or visual-range axis, one row per value.

    The other weather variable is held at zero rain or clear sky respectively.
    """
    if variable not in ('rain', 'fog'):
        raise DomainError(f"variable must be 'rain' or 'fog', got {variable!r}")
    params = params or AttenuationParams()
    coeffs = coeffs or TuningCoefficients.baseline()
    gamma_a = params.gamma_a(sensor_kind) if gamma_a is None else gamma_a

    rows = []
    for x in values:
        gamma_r = rain_attenuation(sensor_kind, x, params, coeffs.eta_rain) if variable == 'rain' else 0.0
        gamma_f = fog_attenuation(sensor_kind, x, params, wavelength_m, coeffs.eta_fog) if variable == 'fog' else 0.0
        rows.append({
            'x': float(x),
            'gamma_r': gamma_r,
            'gamma_f': gamma_f,
            'gamma_a': gamma_a,
            'gamma': total_attenuation(gamma_r, gamma_f, gamma_a),
        })
    return rows
