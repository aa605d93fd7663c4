"""
Hardware and target specifications entering the link budget.
"""
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy.constants import speed_of_light

from weather_filter.models.attenuation import SensorKind
from weather_filter.utils.exceptions import DomainError

#: Half-width of the radar field of view in degrees.
FOV_LIMIT_DEG: float = 65.0


def _require_positive(obj: object, *names: str) -> None:
    for name in names:
        value = getattr(obj, name)
        if not (math.isfinite(value) and value > 0):
            raise DomainError(f'{type(obj).__name__}.{name} must be finite and > 0, got {value}')


@dataclass(frozen=True)
class GainProfile:
    """
    Azimuth-dependent relative antenna gain, linearly interpolated between the given points.

    Example:

        >>> profile = GainProfile(psi_deg=(-65.0, 0.0, 65.0), gain_db=(-6.0, 0.0, -6.0))
        >>> round(float(profile.gain_db_at(math.radians(32.5))), 6)
        -3.0
        >>> bool(np.isnan(profile.gain_db_at(math.radians(70.0))))
        True
    """
    psi_deg: Tuple[float, ...]
    gain_db: Tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, 'psi_deg', tuple(float(p) for p in self.psi_deg))
        object.__setattr__(self, 'gain_db', tuple(float(g) for g in self.gain_db))
        if len(self.psi_deg) != len(self.gain_db) or len(self.psi_deg) < 2:
            raise DomainError('gain profile needs at least two (psi_deg, gain_db) rows of equal length')
        if any(b <= a for a, b in zip(self.psi_deg, self.psi_deg[1:])):
            raise DomainError('gain profile angles must be strictly increasing')
        if self.psi_deg[0] < -FOV_LIMIT_DEG or self.psi_deg[-1] > FOV_LIMIT_DEG:
            raise DomainError(f'gain profile must lie within [-{FOV_LIMIT_DEG}, {FOV_LIMIT_DEG}] degrees')
        if not self.contains(0.0) or abs(float(self.gain_db_at(0.0))) > 1e-9:
            raise DomainError('gain profile must cover boresight with a relative gain of 0 dB')

    @classmethod
    def flat(cls) -> 'GainProfile':
        return cls(psi_deg=(-FOV_LIMIT_DEG, FOV_LIMIT_DEG), gain_db=(0.0, 0.0))

    @classmethod
    def from_csv(cls, path: str) -> 'GainProfile':
        """Reads a CSV with columns ``psi_deg, gain_db``."""
        frame = pd.read_csv(path, skipinitialspace=True)
        missing = {'psi_deg', 'gain_db'} - set(frame.columns)
        if missing:
            raise DomainError(f'gain profile {path} lacks columns {sorted(missing)}')
        frame = frame.sort_values('psi_deg')
        return cls(psi_deg=tuple(frame['psi_deg']), gain_db=tuple(frame['gain_db']))

    def to_csv(self, path: str) -> None:
        pd.DataFrame({'psi_deg': self.psi_deg, 'gain_db': self.gain_db}).to_csv(path, index=False)

    def contains(self, psi_rad: float) -> bool:
        psi = math.degrees(psi_rad)
        return self.psi_deg[0] <= psi <= self.psi_deg[-1]

    def gain_db_at(self, psi_rad: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """Relative gain in dB, ``nan`` outside the covered span."""
        return np.interp(np.degrees(psi_rad), self.psi_deg, self.gain_db, left=np.nan, right=np.nan)


@dataclass(frozen=True)
class RadarSpec:
    """
    Radar hardware, defaults matching a 77 GHz automotive corner radar.

    ``gamma_a_db`` of ``None`` defers to the atmospheric attenuation of the
    :class:`~weather_filter.models.attenuation.AttenuationParams` in use.
    """
    p_t_w: float = 1e-2
    gain_dbi: float = 16.0
    p_n_w: float = 5e-12
    freq_hz: float = 77e9
    xi: float = 1.875
    m_min: int = 1
    gamma_a_db: Optional[float] = None
    gain_profile: Optional[GainProfile] = None

    kind = SensorKind.RADAR

    def __post_init__(self) -> None:
        _require_positive(self, 'p_t_w', 'p_n_w', 'freq_hz', 'xi')
        if not math.isfinite(self.gain_dbi):
            raise DomainError(f'RadarSpec.gain_dbi must be finite, got {self.gain_dbi}')
        if self.m_min < 1:
            raise DomainError(f'RadarSpec.m_min must be >= 1, got {self.m_min}')
        if self.gamma_a_db is not None and not self.gamma_a_db >= 0:
            raise DomainError(f'RadarSpec.gamma_a_db must be >= 0, got {self.gamma_a_db}')

    @property
    def wavelength_m(self) -> float:
        return speed_of_light / self.freq_hz

    def linear_gain(self, psi_rad: float = 0.0) -> float:
        """Antenna gain as a linear ratio at azimuth ``psi_rad``, ``0`` outside the field of view."""
        relative = 0.0
        if self.gain_profile is not None:
            relative = float(self.gain_profile.gain_db_at(psi_rad))
        elif abs(math.degrees(psi_rad)) > FOV_LIMIT_DEG:
            relative = math.nan
        if math.isnan(relative):
            return 0.0
        return 10**((self.gain_dbi + relative) / 10)


@dataclass(frozen=True)
class LidarSpec:
    """
    Lidar hardware, defaults matching a 905 nm roof-mounted 360 degree scanner.
    """
    p_t_w: float = 22e-2
    aperture_m2: float = 4.4e-2
    p_n_w: float = 1e-8
    transmission: float = 0.9
    q_h_rad: float = 18.27e-3
    q_v_rad: float = 4.57e-3
    wavelength_m: float = 905e-9
    mount_height_m: float = 0.5
    m_min: int = 10
    gamma_a_db: Optional[float] = None

    kind = SensorKind.LIDAR

    def __post_init__(self) -> None:
        _require_positive(self, 'p_t_w', 'aperture_m2', 'p_n_w', 'q_h_rad', 'q_v_rad', 'wavelength_m')
        if not 0 < self.transmission <= 1:
            raise DomainError(f'LidarSpec.transmission must lie in (0, 1], got {self.transmission}')
        if self.m_min < 1:
            raise DomainError(f'LidarSpec.m_min must be >= 1, got {self.m_min}')
        if self.gamma_a_db is not None and not self.gamma_a_db >= 0:
            raise DomainError(f'LidarSpec.gamma_a_db must be >= 0, got {self.gamma_a_db}')


@dataclass(frozen=True)
class TargetSpec:
    """
    Adult pedestrian crossing from right to left.

    Only ``rcs_m2`` (radar) and ``reflectance``, ``width_m`` and ``reflection_angle_rad`` (lidar) enter the
    link budget. The remaining fields describe the target box used when counting detections.
    """
    rcs_m2: float = 10.08
    reflectance: float = 0.5
    width_m: float = 0.4
    length_m: float = 0.3
    height_m: float = 1.8
    surface_m2: float = 0.72
    rotation_rad: float = 0.5 * math.pi
    reflection_angle_rad: float = 0.5 * math.pi
    temperature_c: float = 10.0

    def __post_init__(self) -> None:
        _require_positive(self, 'rcs_m2', 'width_m', 'length_m', 'height_m')
        if not 0 <= self.reflectance <= 1:
            raise DomainError(f'TargetSpec.reflectance must lie in [0, 1], got {self.reflectance}')
        if not 0 < self.reflection_angle_rad < math.pi:
            raise DomainError(f'TargetSpec.reflection_angle_rad must lie in (0, pi), got {self.reflection_angle_rad}')


SensorSpec = Union[RadarSpec, LidarSpec]
