"""
Range sweeps over rain rate or visual range and radar field-of-view maps, emitted as rows for CSV export.
"""
import math
import sys
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from weather_filter.config import Config
from weather_filter.models.attenuation import SensorKind, WeatherCondition
from weather_filter.models.link_budget import fov_map, predict_range, sensor_attenuation
from weather_filter.utils.exceptions import DomainError, ModelMisuseError

SWEEP_MODES = ('baseline', 'wf', 'both')


def inclusive_grid(start: float, stop: float, step: float) -> np.ndarray:
    """
    ``start, start + step, ...`` up to and including ``stop`` when it lies on the grid.

    >>> inclusive_grid(-65.0, 65.0, 32.5).tolist()
    [-65.0, -32.5, 0.0, 32.5, 65.0]
    """
    if not step > 0:
        raise DomainError(f'step must be > 0, got {step}')
    if stop < start:
        raise DomainError(f'stop must not lie below start, got {start} > {stop}')
    num = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(num)


@dataclass(frozen=True)
class SweepRequest:
    """
    Grid over one weather variable, ``stop`` included when it lies on the grid.

    Example:

        >>> values = SweepRequest('radar', 'rain', 0.0, 100.0, 10.0).values()
        >>> len(values), float(values[-1])
        (11, 100.0)
    """
    sensor_kind: SensorKind
    variable: str
    start: float
    stop: float
    step: float
    mode: str = 'both'

    def __post_init__(self) -> None:
        object.__setattr__(self, 'sensor_kind', SensorKind(self.sensor_kind))
        if self.variable not in ('rain', 'fog'):
            raise DomainError(f"variable must be 'rain' or 'fog', got {self.variable!r}")
        if self.mode not in SWEEP_MODES:
            raise DomainError(f'mode must be one of {SWEEP_MODES}, got {self.mode!r}')
        if not self.step > 0:
            raise DomainError(f'step must be > 0, got {self.step}')
        if not self.start < self.stop:
            raise DomainError(f'start must be < stop, got {self.start} >= {self.stop}')
        if self.variable == 'fog' and not self.start > 0:
            raise DomainError(f'visual range sweeps must start above 0 m, got {self.start}')
        if self.variable == 'rain' and self.start < 0:
            raise DomainError(f'rain sweeps must start at or above 0 mm/h, got {self.start}')
        if not math.isfinite(self.stop):
            raise DomainError('stop must be finite')

    @property
    def modes(self) -> List[str]:
        return ['baseline', 'wf'] if self.mode == 'both' else [self.mode]

    def values(self) -> np.ndarray:
        return inclusive_grid(self.start, self.stop, self.step)

    def condition(self, x: float) -> WeatherCondition:
        if self.variable == 'rain':
            return WeatherCondition(rain_rate=float(x))
        return WeatherCondition(fog_visual_range=float(x))


def _check_monotone(rows: Sequence[Dict[str, Any]], column: str, increasing: bool) -> None:
    ranges = np.array([0.0 if row[column] is None else row[column] for row in rows])
    steps = np.diff(ranges)
    bad = np.flatnonzero(steps < 0 if increasing else steps > 0)
    if bad.size:
        i = int(bad[0])
        raise ModelMisuseError(
            f'{column} is not monotone between x={rows[i]["x"]} and x={rows[i + 1]["x"]}: '
            f'{ranges[i]:.4f} -> {ranges[i + 1]:.4f}'
        )


def sweep_rows(config: Config, request: SweepRequest) -> List[Dict[str, Any]]:
    """
    Maximum range per grid value with the overall attenuation of the weather filter, or of the baseline when
    only the baseline is asked for.

    Ranges must not grow with the rain rate and must not shrink with the visual range; a violation is a model bug
    and raises before anything is written.
    """
    kind = request.sensor_kind
    sensor = config.sensor(kind)
    gamma_mode = 'wf' if 'wf' in request.modes else 'baseline'

    rows = []
    for x in request.values():
        condition = request.condition(x)
        gamma_coeffs = config.coefficients(kind, gamma_mode)
        row: Dict[str, Any] = {
            'x': float(x),
            'gamma': sensor_attenuation(sensor, condition, config.attenuation, gamma_coeffs),
        }
        for mode in request.modes:
            coeffs = config.coefficients(kind, mode)
            row[f'range_{mode}'] = predict_range(
                sensor, config.target, condition, config.attenuation, coeffs, config.solver
            )
        rows.append(row)

    for mode in request.modes:
        _check_monotone(rows, f'range_{mode}', increasing=request.variable == 'fog')
    return rows


def fov_rows(config: Config, condition: WeatherCondition, psi_deg: Sequence[float]) -> List[Dict[str, Any]]:
    """Radar range per azimuth in degrees for the baseline and the weather filter."""
    psi_rad = [math.radians(psi) for psi in psi_deg]
    columns = {}
    for mode in ('baseline', 'wf'):
        coeffs = config.coefficients(SensorKind.RADAR, mode)
        columns[mode] = fov_map(
            config.radar, config.target, condition, config.attenuation, coeffs, psi_rad, config.solver
        )
    return [{
        'psi_deg': float(psi),
        'range_baseline': baseline,
        'range_wf': wf,
    } for psi, (_, baseline), (_, wf) in zip(psi_deg, columns['baseline'], columns['wf'])]


def write_csv(rows: Sequence[Dict[str, Any]], path: Optional[str] = None, columns: Optional[List[str]] = None) -> None:
    """Writes rows as CSV to ``path`` or stdout, unreachable ranges spelled ``none``."""
    table = pd.DataFrame(list(rows), columns=columns)
    table.to_csv(path if path not in (None, '-') else sys.stdout, index=False, na_rep='none', float_format='%.6f')
