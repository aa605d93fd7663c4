"""
Per-position detection statistics and the Summary CSV format used as calibration input.
"""
import math
from dataclasses import dataclass, replace
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import pandas as pd

from weather_filter.models.attenuation import SensorKind, WeatherCondition
from weather_filter.utils.exceptions import DomainError

SUMMARY_COLUMNS = ['sensor', 'rain_mmh', 'fog_vis_m', 'd_p', 'n_bar', 'sigma', 'excluded']

#: Pedestrian positions of the measurement protocol in meters.
PAPER_POSITIONS: Tuple[float, ...] = (3.0, 9.0, 15.0, 21.0, 27.0, 33.0, 39.0, 44.0)

ExclusionRule = Callable[[WeatherCondition, float], bool]


@dataclass(frozen=True)
class SummaryRow:
    d_p: float
    n_bar: float
    sigma: float = 0.0
    excluded: bool = False

    def __post_init__(self) -> None:
        if not self.d_p > 0:
            raise DomainError(f'd_p must be > 0, got {self.d_p}')
        if not self.n_bar >= 0:
            raise DomainError(f'n_bar must be >= 0, got {self.n_bar}')
        if not self.sigma >= 0:
            raise DomainError(f'sigma must be >= 0, got {self.sigma}')


@dataclass(frozen=True)
class MeasurementSummary:
    """
    Mean recurring detection count and its spread per target position, for one sensor under one condition.

    Rows are kept sorted by distance.
    """
    sensor_kind: SensorKind
    condition: WeatherCondition
    rows: Tuple[SummaryRow, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, 'sensor_kind', SensorKind(self.sensor_kind))
        rows = tuple(sorted(self.rows, key=lambda row: row.d_p))
        distances = [row.d_p for row in rows]
        if len(set(distances)) != len(distances):
            raise DomainError(f'one row per distance expected, got {distances}')
        object.__setattr__(self, 'rows', rows)

    @property
    def excluded(self) -> FrozenSet[Tuple[WeatherCondition, float]]:
        return frozenset((self.condition, row.d_p) for row in self.rows if row.excluded)

    def active_rows(self) -> List[SummaryRow]:
        return [row for row in self.rows if not row.excluded]

    def with_exclusions(self, rules: Iterable[ExclusionRule]) -> 'MeasurementSummary':
        """Flags every row matched by one of ``rules`` as excluded."""
        rules = list(rules)
        rows = tuple(
            replace(row, excluded=True) if any(rule(self.condition, row.d_p) for rule in rules) else row
            for row in self.rows
        )
        return replace(self, rows=rows)


def _parse_flag(value: object) -> bool:
    if isinstance(value, str):
        return value.strip().lower() in ('1', 'true', 'yes')
    return bool(value) and not (isinstance(value, float) and math.isnan(value))


def read_summaries(path: str, sensor_kind: Optional[SensorKind] = None) -> List[MeasurementSummary]:
    """
    Reads a Summary CSV, one :class:`MeasurementSummary` per sensor and condition in order of appearance.
    ``fog_vis_m`` of ``inf`` stands for clear sky.
    """
    data = pd.read_csv(path, skipinitialspace=True, dtype={'sensor': str})
    missing = set(SUMMARY_COLUMNS) - set(data.columns)
    if missing:
        raise DomainError(f'summary file {path} lacks columns {sorted(missing)}')

    grouped: Dict[Tuple[str, float, float], List[SummaryRow]] = {}
    for record in data.to_dict('records'):
        key = (str(record['sensor']).strip(), float(record['rain_mmh']), float(record['fog_vis_m']))
        row = SummaryRow(
            float(record['d_p']), float(record['n_bar']), float(record['sigma']), _parse_flag(record['excluded'])
        )
        grouped.setdefault(key, []).append(row)

    summaries = [
        MeasurementSummary(SensorKind(kind), WeatherCondition(rain, fog), tuple(rows))
        for (kind, rain, fog), rows in grouped.items()
    ]
    if sensor_kind is not None:
        summaries = [summary for summary in summaries if summary.sensor_kind is SensorKind(sensor_kind)]
    return summaries


def write_summaries(summaries: Sequence[MeasurementSummary], path: str) -> None:
    records = [{
        'sensor': summary.sensor_kind.value,
        'rain_mmh': summary.condition.rain_rate,
        'fog_vis_m': summary.condition.fog_visual_range,
        'd_p': row.d_p,
        'n_bar': row.n_bar,
        'sigma': row.sigma,
        'excluded': int(row.excluded),
    } for summary in summaries for row in summary.rows]
    pd.DataFrame(records, columns=SUMMARY_COLUMNS).to_csv(path, index=False)
