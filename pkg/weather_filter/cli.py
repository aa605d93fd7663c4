"""
Command line entry point.

Example::

    weather-filter predict --sensor radar --rain 16
    weather-filter sweep --sensor lidar --variable fog --start 5 --stop 200 --step 5 --output fog.csv
    weather-filter predict --config baseline --sensor lidar --fog 20 --target.reflectance 0.3

Results go to stdout or the given files, diagnostics to stderr. Exit codes: 0 success, 1 internal model error,
2 invalid input, 3 I/O error, 4 calibration without convergence.
"""
import logging
import math
import os
import sys
from argparse import ArgumentParser, Namespace
from typing import List, Optional

from pytorch_lightning.utilities import rank_zero_info

from weather_filter.calibration.problem import CalibrationProblem, EXCLUSION_PRESETS, observations_from_summaries
from weather_filter.calibration.regression import calibrate, calibrate_two_stage, fit_report
from weather_filter.config import Config, load_config, PRESETS, save_config
from weather_filter.datasets.frames import read_captures, read_frames
from weather_filter.datasets.summary import read_summaries, write_summaries
from weather_filter.datasets.synthetic_dataset import generate_synthetic
from weather_filter.metrics.detection import max_detected_distance, summarize_captures
from weather_filter.models.attenuation import (
    attenuation_curve,
    AttenuationParams,
    CLEAR,
    SensorKind,
    TuningCoefficients,
    WeatherCondition,
)
from weather_filter.models.link_budget import predict_range, SolverGrid
from weather_filter.models.sensors import LidarSpec, RadarSpec, TargetSpec
from weather_filter.sweeps import fov_rows, inclusive_grid, sweep_rows, SweepRequest, write_csv
from weather_filter.utils.arguments import SpecArgumentParser
from weather_filter.utils.exceptions import (
    ConvergenceError,
    DomainError,
    ModelMisuseError,
    WeatherFilterError,
)

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INVALID = 2
EXIT_IO = 3
EXIT_NOT_CONVERGED = 4

DEFAULT_FREE_VARIABLES = {
    SensorKind.RADAR: ('eta_rain', 'eta_fog', 'xi'),
    SensorKind.LIDAR: ('eta_rain', 'eta_fog'),
}

SPEC_SECTIONS = (
    ('radar', RadarSpec),
    ('lidar', LidarSpec),
    ('target', TargetSpec),
    ('attenuation', AttenuationParams),
    ('tuning.radar', TuningCoefficients),
    ('tuning.lidar', TuningCoefficients),
    ('solver', SolverGrid),
)


def format_range(value: Optional[float]) -> str:
    """
    >>> format_range(51.1086), format_range(None)
    ('51.11', 'none')
    """
    return 'none' if value is None else f'{value:.2f}'


def cmd_predict(config: Config, sensor_kind: SensorKind, condition: WeatherCondition, psi_deg: float = 0.0) -> int:
    """Prints the baseline and the weather filter range, one line each."""
    sensor = config.sensor(sensor_kind)
    if psi_deg and sensor.kind is not SensorKind.RADAR:
        raise DomainError('an azimuth only applies to radar, lidar covers the full circle')
    for mode in ('baseline', 'wf'):
        coeffs = config.coefficients(sensor_kind, mode)
        value = predict_range(
            sensor, config.target, condition, config.attenuation, coeffs, config.solver, psi=math.radians(psi_deg)
        )
        print(f'{mode}: {format_range(value)}')
    return EXIT_OK


def cmd_sweep(config: Config, request: SweepRequest, output: Optional[str] = None) -> int:
    """Writes the sweep as CSV with columns ``x, gamma, range_baseline, range_wf``."""
    rows = sweep_rows(config, request)
    columns = ['x', 'gamma'] + [f'range_{mode}' for mode in request.modes]
    write_csv(rows, output, columns)
    return EXIT_OK


def _condition(args: Namespace) -> WeatherCondition:
    return WeatherCondition(rain_rate=args.rain, fog_visual_range=args.fog)


def _run_predict(config: Config, args: Namespace) -> int:
    return cmd_predict(config, SensorKind(args.sensor), _condition(args), args.psi_deg)


def _run_sweep(config: Config, args: Namespace) -> int:
    request = SweepRequest(args.sensor, args.variable, args.start, args.stop, args.step, args.mode)
    return cmd_sweep(config, request, args.output)


def _run_fov(config: Config, args: Namespace) -> int:
    psi = inclusive_grid(args.psi_start, args.psi_stop, args.psi_step).tolist()
    write_csv(fov_rows(config, _condition(args), psi), args.output, ['psi_deg', 'range_baseline', 'range_wf'])
    return EXIT_OK


def _run_attenuation(config: Config, args: Namespace) -> int:
    request = SweepRequest(args.sensor, args.variable, args.start, args.stop, args.step, args.mode)
    sensor = config.sensor(request.sensor_kind)
    rows = attenuation_curve(
        request.sensor_kind,
        request.variable,
        request.values().tolist(),
        config.attenuation,
        config.coefficients(request.sensor_kind, args.mode),
        wavelength_m=sensor.wavelength_m,
        gamma_a=sensor.gamma_a_db,
    )
    write_csv(rows, args.output, ['x', 'gamma_r', 'gamma_f', 'gamma_a', 'gamma'])
    return EXIT_OK


def _run_ingest(config: Config, args: Namespace) -> int:
    kind = SensorKind(args.sensor)
    captures = read_captures(args.manifest)
    freespace = read_frames(args.freespace) if args.freespace else None
    summary = summarize_captures(
        captures, kind, _condition(args), config.target, args.eps, args.margin, freespace_frames=freespace
    )
    interval = max_detected_distance(summary, config.sensor(kind).m_min)
    rank_zero_info(f'{kind.value} under {summary.condition}: detected up to [{interval.lower}, {interval.upper})')

    summaries = [summary]
    if args.append and args.output not in (None, '-') and os.path.exists(args.output):
        summaries = read_summaries(args.output) + summaries
    write_summaries(summaries, args.output if args.output not in (None, '-') else sys.stdout)
    return EXIT_OK


def _run_calibrate(config: Config, args: Namespace) -> int:
    kind = SensorKind(args.sensor)
    sensor = config.sensor(kind)
    free = tuple(args.free) if args.free else DEFAULT_FREE_VARIABLES[kind]

    summaries = read_summaries(args.summary, sensor_kind=kind)
    rules = [EXCLUSION_PRESETS[name] for name in args.exclude]
    observations = observations_from_summaries(summaries, sensor.m_min, args.fit_point, rules)
    problem = CalibrationProblem(
        sensor,
        tuple(observations),
        target=config.target,
        params=config.attenuation,
        free_variables=free,
        initial=config.tuning.for_kind(kind) if args.warm_start else TuningCoefficients.baseline(),
        grid=config.solver,
    )
    fit = calibrate_two_stage if args.two_stage else calibrate
    result = fit(problem, n_starts=args.starts, seed=args.seed, max_evals=args.max_evals)

    print(fit_report(result, problem))
    if args.output:
        save_config(config.with_tuning(kind, result.coefficients), args.output)
        rank_zero_info(f'wrote fitted configuration to {args.output}')
    if not result.converged:
        raise ConvergenceError(f'calibration of the {kind.value} did not converge')
    return EXIT_OK


def _run_generate(config: Config, args: Namespace) -> int:
    kind = SensorKind(args.sensor)
    manifest = generate_synthetic(
        config.sensor(kind),
        config.target,
        _condition(args),
        args.out_dir,
        seed=args.seed,
        dropout=args.dropout,
        noise_rate=args.noise_rate,
        cluster_size=args.cluster_size,
        clutter_points=args.clutter,
        num_frames=args.frames,
        params=config.attenuation,
        coeffs=config.coefficients(kind, args.mode),
        grid=config.solver,
    )
    print(manifest)
    return EXIT_OK


def _add_condition_args(parser: ArgumentParser) -> None:
    parser.add_argument('--rain', type=float, default=0.0, help='rain rate in mm/h')
    parser.add_argument('--fog', type=float, default=CLEAR, help='fog visual range in m, inf for no fog')


def _add_grid_args(parser: ArgumentParser) -> None:
    parser.add_argument('--variable', choices=('rain', 'fog'), required=True)
    parser.add_argument('--start', type=float, required=True)
    parser.add_argument('--stop', type=float, required=True)
    parser.add_argument('--step', type=float, required=True)


def build_parser() -> SpecArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument(
        '--config', default='paper-2024', help=f'preset ({", ".join(PRESETS)}) or path to a JSON configuration'
    )
    common.add_argument('--verbose', action='store_true', help='debug output on stderr')

    parser = SpecArgumentParser(prog='weather-filter', description=__doc__.splitlines()[1])
    subparsers = parser.add_subparsers(dest='command', required=True)

    def add_command(name: str, func, help_text: str, sensor: bool = True) -> SpecArgumentParser:
        sub = subparsers.add_parser(name, help=help_text, parents=[common])
        if sensor:
            sub.add_argument('--sensor', choices=[kind.value for kind in SensorKind], required=True)
        for section, cls in SPEC_SECTIONS:
            sub.add_spec_args(section, cls)
        sub.set_defaults(func=func)
        return sub

    sub = add_command('predict', _run_predict, 'maximum range of baseline and weather filter')
    _add_condition_args(sub)
    sub.add_argument('--psi-deg', type=float, default=0.0, help='radar azimuth in degrees')

    sub = add_command('sweep', _run_sweep, 'maximum range over a rain or visual range grid')
    _add_grid_args(sub)
    sub.add_argument('--mode', choices=('baseline', 'wf', 'both'), default='both')
    sub.add_argument('--output', default='-', help='CSV file, - for stdout')

    sub = add_command('fov', _run_fov, 'radar range per azimuth', sensor=False)
    _add_condition_args(sub)
    sub.add_argument('--psi-start', type=float, default=-65.0)
    sub.add_argument('--psi-stop', type=float, default=65.0)
    sub.add_argument('--psi-step', type=float, default=5.0)
    sub.add_argument('--output', default='-', help='CSV file, - for stdout')

    sub = add_command('attenuation', _run_attenuation, 'attenuation components over a rain or visual range grid')
    _add_grid_args(sub)
    sub.add_argument('--mode', choices=('baseline', 'wf'), default='baseline')
    sub.add_argument('--output', default='-', help='CSV file, - for stdout')

    sub = add_command('ingest', _run_ingest, 'frame captures to a summary CSV')
    _add_condition_args(sub)
    sub.add_argument('--manifest', required=True, help='capture manifest with columns d_p, frames')
    sub.add_argument('--freespace', help='Frame CSV of the same scene without the target, lidar only')
    sub.add_argument('--eps', type=float, default=0.1, help='recurring point tolerance in m')
    sub.add_argument('--margin', type=float, default=0.2, help='target box margin in m')
    sub.add_argument('--output', default='-', help='summary CSV, - for stdout')
    sub.add_argument('--append', action='store_true', help='keep the summaries already in --output')

    sub = add_command('calibrate', _run_calibrate, 'fit the tuning coefficients to a summary CSV')
    sub.add_argument('--summary', required=True, help='summary CSV')
    sub.add_argument('--free', nargs='+', choices=('eta_rain', 'eta_fog', 'xi'), help='coefficients to fit')
    sub.add_argument('--fit-point', choices=('lower', 'midpoint'), default='lower', help='fitted point of the interval')
    sub.add_argument('--exclude', action='append', default=[], choices=sorted(EXCLUSION_PRESETS))
    sub.add_argument('--two-stage', action='store_true', help='fit xi on clear weather first')
    sub.add_argument('--warm-start', action='store_true', help='start from the configured tuning instead of ones')
    sub.add_argument('--starts', type=int, default=5)
    sub.add_argument('--seed', type=int, default=0)
    sub.add_argument('--max-evals', type=int, default=10_000)
    sub.add_argument('--output', help='write the configuration with the fitted tuning to this JSON file')

    sub = add_command('generate', _run_generate, 'synthetic captures with ground truth')
    _add_condition_args(sub)
    sub.add_argument('--out-dir', required=True)
    sub.add_argument('--seed', type=int, default=0)
    sub.add_argument('--dropout', type=float, default=0.0)
    sub.add_argument('--noise-rate', type=float, default=0.0, help='background points per frame')
    sub.add_argument('--cluster-size', type=int, default=25)
    sub.add_argument('--clutter', type=int, default=0, help='static points per box, also in the free-space run')
    sub.add_argument('--frames', type=int, default=50)
    sub.add_argument('--mode', choices=('baseline', 'wf'), default='wf', help='model deciding the planted positions')
    return parser


def cli_main(args: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        namespace = parser.parse_spec_args(args)
    except SystemExit as err:
        return int(err.code or 0)

    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if namespace.verbose else logging.INFO,
        format='%(levelname)s %(name)s: %(message)s',
    )

    try:
        config = load_config(namespace.config)
        if namespace.spec_overrides:
            config = config.override(namespace.spec_overrides)
        return namespace.func(config, namespace)
    except ConvergenceError as err:
        log.error(err)
        return EXIT_NOT_CONVERGED
    except ModelMisuseError as err:
        log.error('internal model error: %s', err)
        return EXIT_INTERNAL
    except (WeatherFilterError, ValueError) as err:
        log.error(err)
        return EXIT_INVALID
    except OSError as err:
        log.error(err)
        return EXIT_IO


def main() -> None:
    sys.exit(cli_main())


if __name__ == '__main__':
    main()
