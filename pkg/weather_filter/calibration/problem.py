"""
Regression problem behind the weather filter: which coefficients are free and which measured ranges they have to match.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from pytorch_lightning.utilities import rank_zero_warn

from weather_filter.datasets.summary import ExclusionRule, MeasurementSummary
from weather_filter.metrics.detection import DetectionInterval, is_detected, max_detected_distance
from weather_filter.models.attenuation import AttenuationParams, SensorKind, TuningCoefficients, WeatherCondition
from weather_filter.models.link_budget import predict_range, SolverGrid
from weather_filter.models.sensors import SensorSpec, TargetSpec
from weather_filter.utils.exceptions import CalibrationError, DomainError

log = logging.getLogger(__name__)

FREE_VARIABLES: Tuple[str, ...] = ('eta_rain', 'eta_fog', 'xi')
DEFAULT_BOUNDS: Tuple[float, float] = (1e-4, 1e4)

#: Named exclusion rules for summaries with known outliers.
EXCLUSION_PRESETS: Dict[str, ExclusionRule] = {
    # irregular rainfall pattern during the rain runs at 15 m
    'paper-rain-15m': lambda condition, d_p: condition.rain_rate > 0 and d_p == 15.0,
}

TARGET_MODES = ('lower', 'midpoint')


@dataclass(frozen=True)
class Observation:
    """
    Measured maximum range ``distance_m`` under ``condition``.

    ``d_p`` is the measured position the observation stems from and identifies it in exclusion sets,
    it defaults to ``distance_m``.
    """
    condition: WeatherCondition
    distance_m: float
    d_p: Optional[float] = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.distance_m) and self.distance_m > 0):
            raise DomainError(f'observed distance must be finite and > 0, got {self.distance_m}')
        if self.d_p is None:
            object.__setattr__(self, 'd_p', self.distance_m)

    @property
    def key(self) -> Tuple[WeatherCondition, float]:
        return self.condition, self.d_p


@dataclass(frozen=True)
class CalibrationProblem:
    """
    Fixed sensor, target and physical constants plus the observations the free coefficients are fitted to.

    Coefficients that are not free keep their value from ``initial``.
    """
    sensor: SensorSpec
    observations: Tuple[Observation, ...]
    target: TargetSpec = field(default_factory=TargetSpec)
    params: AttenuationParams = field(default_factory=AttenuationParams)
    free_variables: Tuple[str, ...] = ('eta_rain', 'eta_fog')
    bounds: Mapping[str, Tuple[float, float]] = field(default_factory=dict)
    exclusions: FrozenSet[Tuple[WeatherCondition, float]] = frozenset()
    initial: TuningCoefficients = field(default_factory=TuningCoefficients.baseline)
    grid: SolverGrid = field(default_factory=SolverGrid)

    def __post_init__(self) -> None:
        object.__setattr__(self, 'observations', tuple(self.observations))
        object.__setattr__(self, 'free_variables', tuple(self.free_variables))
        object.__setattr__(self, 'exclusions', frozenset(self.exclusions))

        if not self.free_variables:
            raise CalibrationError('at least one free variable is needed')
        unknown = [name for name in self.free_variables if name not in FREE_VARIABLES]
        if unknown or len(set(self.free_variables)) != len(self.free_variables):
            raise CalibrationError(
                f'free variables must be distinct names out of {FREE_VARIABLES}, got {self.free_variables}'
            )
        if 'xi' in self.free_variables and self.sensor.kind is not SensorKind.RADAR:
            raise CalibrationError('xi only enters the radar link budget and cannot be fitted for lidar')

        bounds = {name: tuple(self.bounds.get(name, DEFAULT_BOUNDS)) for name in self.free_variables}
        for name, (lo, hi) in bounds.items():
            if not 0 < lo < hi < math.inf:
                raise CalibrationError(f'bounds of {name} must satisfy 0 < lo < hi, got ({lo}, {hi})')
            if not lo <= getattr(self.initial, name) <= hi:
                raise CalibrationError(f'initial {name} = {getattr(self.initial, name)} lies outside its bounds')
        object.__setattr__(self, 'bounds', bounds)

    @property
    def log_bounds(self) -> List[Tuple[float, float]]:
        return [(math.log(lo), math.log(hi)) for lo, hi in (self.bounds[name] for name in self.free_variables)]

    def active_observations(self) -> List[Observation]:
        return [obs for obs in self.observations if obs.key not in self.exclusions]

    def coefficients(self, values: Sequence[float]) -> TuningCoefficients:
        """Coefficients with the free variables set to ``values``, in the order of ``free_variables``."""
        return replace(self.initial, **{name: float(value) for name, value in zip(self.free_variables, values)})

    def values(self, coeffs: TuningCoefficients) -> np.ndarray:
        return np.array([getattr(coeffs, name) for name in self.free_variables], dtype=float)

    def check_bounds(self, coeffs: TuningCoefficients) -> None:
        for name in self.free_variables:
            lo, hi = self.bounds[name]
            value = getattr(coeffs, name)
            if not lo <= value <= hi:
                raise DomainError(f'{name} = {value} lies outside its bounds ({lo}, {hi})')

    def predict(self, coeffs: TuningCoefficients, condition: WeatherCondition) -> Optional[float]:
        return predict_range(self.sensor, self.target, condition, self.params, coeffs, self.grid)


def residuals(coeffs: TuningCoefficients, problem: CalibrationProblem) -> List[float]:
    """
    Predicted minus measured range per active observation. Undetectable predictions count as the end of the
    solver grid.
    """
    result = []
    for obs in problem.active_observations():
        predicted = problem.predict(coeffs, obs.condition)
        predicted = problem.grid.gamma_max_m if predicted is None else predicted
        result.append(predicted - obs.distance_m)
    return result


def objective(coeffs: TuningCoefficients, problem: CalibrationProblem) -> float:
    """
    Sum of squared range residuals in square meters over the observations that are not excluded.

    Example:

        >>> from weather_filter.models.sensors import RadarSpec
        >>> clear = WeatherCondition()
        >>> baseline = predict_range(RadarSpec(), TargetSpec(), clear)
        >>> problem = CalibrationProblem(RadarSpec(), (Observation(clear, baseline + 3.0), ), free_variables=('xi', ))
        >>> round(objective(TuningCoefficients(), problem), 6)
        9.0
    """
    if not problem.active_observations():
        raise CalibrationError('no observation is left to evaluate the objective on')
    problem.check_bounds(coeffs)
    return float(sum(r**2 for r in residuals(coeffs, problem)))


def _nearest_position_interval(summary: MeasurementSummary, m: float) -> DetectionInterval:
    rows = summary.active_rows()
    if len(rows) >= 2 and is_detected(rows[0].n_bar, m) and not is_detected(rows[1].n_bar, m):
        return DetectionInterval(rows[0].d_p, rows[1].d_p)
    return max_detected_distance(summary, m)


def observations_from_summaries(
    summaries: Iterable[MeasurementSummary],
    m: float,
    target: str = 'lower',
    exclusions: Sequence[ExclusionRule] = (),
) -> List[Observation]:
    """
    One observation per summary from its measured detection interval.

    When the second position already misses the threshold, only the nearest position counts, whatever happens
    further out. Summaries without any detection carry no range and are dropped with a warning.

    Args:
        summaries: measurement summaries of one sensor
        m: minimum recurring detection points
        target: ``lower`` fits the furthest detected position, ``midpoint`` the middle of the interval
        exclusions: rules flagging outlier rows before the interval is taken
    """
    if target not in TARGET_MODES:
        raise DomainError(f'target must be one of {TARGET_MODES}, got {target!r}')

    observations = []
    for summary in summaries:
        summary = summary.with_exclusions(exclusions)
        interval = _nearest_position_interval(summary, m)
        if interval.is_empty:
            rank_zero_warn(f'no position detected under {summary.condition}, dropping it from the calibration')
            continue
        distance = interval.lower if target == 'lower' else interval.midpoint()
        log.debug('observation %s -> [%s, %s) fitted at %.2f m', summary.condition, interval.lower, interval.upper,
                  distance)
        observations.append(Observation(summary.condition, distance, interval.lower))
    return observations
