"""
Nonlinear regression of the tuning coefficients: bounded Nelder-Mead in log-parameter space with multiple starts.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import List, Tuple

import numpy as np
from pytorch_lightning.utilities import rank_zero_info, rank_zero_warn
from scipy.optimize import minimize

from weather_filter.calibration.problem import CalibrationProblem, objective, residuals
from weather_filter.models.attenuation import TuningCoefficients
from weather_filter.utils.exceptions import CalibrationError
from weather_filter.utils.printing import dicts_to_table

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CalibrationResult:
    coefficients: TuningCoefficients
    objective: float
    residuals: Tuple[float, ...]
    iterations: int
    converged: bool
    free_variables: Tuple[str, ...] = ()
    start_index: int = 0


def _check_problem(problem: CalibrationProblem) -> None:
    active = problem.active_observations()
    if problem.observations and not active:
        raise CalibrationError('every observation is excluded')
    if len(active) < len(problem.free_variables):
        raise CalibrationError(
            f'{len(active)} observations cannot determine {len(problem.free_variables)} free variables'
        )


def _from_log(problem: CalibrationProblem, log_values: np.ndarray) -> TuningCoefficients:
    lower, upper = np.array([problem.bounds[name] for name in problem.free_variables]).T
    return problem.coefficients(np.clip(np.exp(log_values), lower, upper))


def _starts(problem: CalibrationProblem, n_starts: int, seed: int) -> np.ndarray:
    """Initial points in log space, the first from ``problem.initial``, the others log-uniform within the bounds."""
    rng = np.random.default_rng(seed)
    bounds = np.array(problem.log_bounds)
    draws = rng.uniform(bounds[:, 0], bounds[:, 1], size=(n_starts - 1, len(problem.free_variables)))
    return np.vstack([np.log(problem.values(problem.initial)), draws])


def starting_points(problem: CalibrationProblem, n_starts: int = 5, seed: int = 0) -> List[TuningCoefficients]:
    """Coefficients every start of :func:`calibrate` begins from for the same ``n_starts`` and ``seed``."""
    return [_from_log(problem, x0) for x0 in _starts(problem, n_starts, seed)]


def calibrate(
    problem: CalibrationProblem,
    n_starts: int = 5,
    seed: int = 0,
    fatol: float = 1e-8,
    xatol: float = 1e-6,
    max_evals: int = 10_000,
) -> CalibrationResult:
    """
    Fits the free coefficients of ``problem`` by minimizing :func:`~weather_filter.calibration.problem.objective`.

    Every start runs a bounded simplex search until the objective spread of the simplex drops below ``fatol``
    and its extent below ``xatol`` (log units) or ``max_evals`` evaluations are spent. The best start wins,
    ties going to the lower start index.

    Args:
        problem: observations and free variables
        n_starts: number of starts, at least 5
        seed: seed of the log-uniform starting points
        fatol: objective spread in square meters that ends a start
        xatol: simplex extent in log space that ends a start
        max_evals: evaluation budget per start

    Example:

        >>> from weather_filter.calibration.problem import Observation
        >>> from weather_filter.models.attenuation import WeatherCondition
        >>> from weather_filter.models.link_budget import predict_range
        >>> from weather_filter.models.sensors import LidarSpec, TargetSpec
        >>> fog = WeatherCondition(fog_visual_range=50.0)
        >>> measured = predict_range(LidarSpec(), TargetSpec(), fog, coeffs=TuningCoefficients(eta_fog=0.5))
        >>> problem = CalibrationProblem(LidarSpec(), (Observation(fog, measured), ), free_variables=('eta_fog', ))
        >>> result = calibrate(problem)
        >>> round(result.coefficients.eta_fog, 2)
        0.5
    """
    _check_problem(problem)
    if n_starts < 5:
        raise CalibrationError(f'at least 5 starts are needed, got {n_starts}')

    bounds = problem.log_bounds

    def fun(log_values: np.ndarray) -> float:
        return objective(_from_log(problem, log_values), problem)

    best, best_index, evaluations = None, 0, 0
    for index, x0 in enumerate(_starts(problem, n_starts, seed)):
        res = minimize(
            fun,
            x0,
            method='Nelder-Mead',
            bounds=bounds,
            options={'fatol': fatol, 'xatol': xatol, 'maxfev': max_evals, 'maxiter': max_evals},
        )
        evaluations += int(res.nfev)
        log.debug('start %d from %s ended at %s with objective %.6g', index, np.exp(x0), np.exp(res.x), res.fun)
        if best is None or res.fun < best.fun:
            best, best_index = res, index

    coeffs = _from_log(problem, best.x)
    converged = bool(best.success)
    if not converged:
        rank_zero_warn(f'calibration did not converge within {max_evals} evaluations: {best.message}')
    fitted = ', '.join(f'{name}={getattr(coeffs, name):.6g}' for name in problem.free_variables)
    rank_zero_info(f'fitted {fitted} after {evaluations} evaluations')
    return CalibrationResult(
        coefficients=coeffs,
        objective=objective(coeffs, problem),
        residuals=tuple(residuals(coeffs, problem)),
        iterations=evaluations,
        converged=converged,
        free_variables=problem.free_variables,
        start_index=best_index,
    )


def calibrate_two_stage(problem: CalibrationProblem, **kwargs) -> CalibrationResult:
    """
    Fits ``xi`` on the clear-weather observations first, then the remaining free variables with ``xi`` held.

    Problems without a free ``xi`` are fitted in a single stage. Keyword arguments go to :func:`calibrate`.
    """
    if 'xi' not in problem.free_variables or len(problem.free_variables) == 1:
        return calibrate(problem, **kwargs)

    clear = tuple(obs for obs in problem.active_observations() if obs.condition.is_clear)
    if not clear:
        raise CalibrationError('the two-stage fit needs at least one clear-weather observation for xi')
    offset = calibrate(replace(problem, observations=clear, free_variables=('xi', )), **kwargs)

    rest = tuple(name for name in problem.free_variables if name != 'xi')
    weather = calibrate(replace(problem, free_variables=rest, initial=offset.coefficients), **kwargs)
    coeffs = weather.coefficients
    return CalibrationResult(
        coefficients=coeffs,
        objective=objective(coeffs, problem),
        residuals=tuple(residuals(coeffs, problem)),
        iterations=offset.iterations + weather.iterations,
        converged=offset.converged and weather.converged,
        free_variables=problem.free_variables,
        start_index=weather.start_index,
    )


def fit_report(result: CalibrationResult, problem: CalibrationProblem) -> str:
    """Human-readable summary of a fit with one residual line per active observation."""
    rows = []
    for obs, residual in zip(problem.active_observations(), result.residuals):
        rows.append({
            'rain_mmh': obs.condition.rain_rate,
            'fog_vis_m': obs.condition.fog_visual_range,
            'measured_m': obs.distance_m,
            'predicted_m': obs.distance_m + residual,
            'residual_m': residual,
        })
    coefficients = ', '.join(f'{name}={getattr(result.coefficients, name):.6g}' for name in problem.free_variables)
    status = 'converged' if result.converged else 'NOT converged'
    table = dicts_to_table(
        rows,
        keys=['rain_mmh', 'fog_vis_m', 'measured_m', 'predicted_m', 'residual_m'],
        fcodes={'rain_mmh': 'g', 'fog_vis_m': 'g', 'measured_m': '.2f', 'predicted_m': '.2f', 'residual_m': '+.3f'},
    )
    rmse = math.sqrt(result.objective / len(rows)) if rows else math.nan
    return '\n'.join([
        f'{problem.sensor.kind.value} fit ({status}, {result.iterations} evaluations)',
        f'coefficients: {coefficients}',
        f'objective: {result.objective:.6g} m^2, rmse: {rmse:.4f} m',
        '',
        table,
    ])
