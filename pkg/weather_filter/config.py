"""
Configuration of sensors, target, attenuation constants, tuning coefficients and solver grid.

A configuration is stored as JSON whose keys are the dataclass field names, which carry their units
(``p_t_w``, ``gain_dbi``, ``freq_hz``). Sections missing from a file take their defaults.
"""
import json
import math
import typing
from dataclasses import asdict, dataclass, field, fields, is_dataclass, replace
from typing import Any, Dict, Mapping, Optional, Type, Union

from weather_filter.models.attenuation import AttenuationParams, SensorKind, TuningCoefficients
from weather_filter.models.link_budget import SolverGrid
from weather_filter.models.sensors import GainProfile, LidarSpec, RadarSpec, SensorSpec, TargetSpec
from weather_filter.utils.exceptions import ConfigError, DomainError

MODES = ('baseline', 'wf')


@dataclass(frozen=True)
class SensorTuning:
    radar: TuningCoefficients = field(default_factory=TuningCoefficients.baseline)
    lidar: TuningCoefficients = field(default_factory=TuningCoefficients.baseline)

    def for_kind(self, kind: SensorKind) -> TuningCoefficients:
        return getattr(self, SensorKind(kind).value)


@dataclass(frozen=True)
class Config:
    """
    Everything a prediction needs.

    Example:

        >>> config = load_config('paper-2024')
        >>> config.tuning.lidar.eta_fog
        0.199
        >>> Config.from_dict(config.to_dict()) == config
        True
    """
    radar: RadarSpec = field(default_factory=RadarSpec)
    lidar: LidarSpec = field(default_factory=LidarSpec)
    target: TargetSpec = field(default_factory=TargetSpec)
    attenuation: AttenuationParams = field(default_factory=AttenuationParams)
    tuning: SensorTuning = field(default_factory=SensorTuning)
    solver: SolverGrid = field(default_factory=SolverGrid)

    def sensor(self, kind: SensorKind) -> SensorSpec:
        return getattr(self, SensorKind(kind).value)

    def coefficients(self, kind: SensorKind, mode: str = 'wf') -> TuningCoefficients:
        """Tuning of the weather filter for ``mode='wf'``, all ones for ``mode='baseline'``."""
        if mode not in MODES:
            raise DomainError(f'mode must be one of {MODES}, got {mode!r}')
        return TuningCoefficients.baseline() if mode == 'baseline' else self.tuning.for_kind(kind)

    def with_tuning(self, kind: SensorKind, coeffs: TuningCoefficients) -> 'Config':
        return replace(self, tuning=replace(self.tuning, **{SensorKind(kind).value: coeffs}))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'Config':
        return _build(cls, data, '')

    def override(self, values: Mapping[str, Any]) -> 'Config':
        """
        Replaces single fields addressed by dotted paths.

        >>> Config().override({'radar.xi': 1.0, 'tuning.lidar.eta_fog': 0.5}).radar.xi
        1.0
        """
        data = self.to_dict()
        for path, value in values.items():
            *parents, name = path.split('.')
            node = data
            for i, key in enumerate(parents):
                if not isinstance(node.get(key), dict):
                    raise ConfigError('unknown configuration section', '.'.join(parents[:i + 1]))
                node = node[key]
            if name not in node:
                raise ConfigError('unknown configuration key', path)
            node[name] = asdict(value) if is_dataclass(value) else value
        return Config.from_dict(data)


def _coerce(value: Any, annotation: Any, path: str) -> Any:
    if typing.get_origin(annotation) is Union:
        if value is None:
            return None
        annotation = next(arg for arg in typing.get_args(annotation) if arg is not type(None))
    if annotation is GainProfile:
        if not isinstance(value, Mapping):
            raise ConfigError('gain profile must be an object with psi_deg and gain_db lists', path)
        unknown = set(value) - {'psi_deg', 'gain_db'}
        if unknown:
            raise ConfigError('unknown configuration key', f'{path}.{sorted(unknown)[0]}')
        return GainProfile(psi_deg=tuple(value.get('psi_deg', ())), gain_db=tuple(value.get('gain_db', ())))
    if is_dataclass(annotation):
        return _build(annotation, value, path)
    if annotation is int:
        if isinstance(value, bool) or not float(value).is_integer():
            raise ConfigError(f'expected an integer, got {value!r}', path)
        return int(value)
    if annotation is float:
        if isinstance(value, bool) or value is None:
            raise ConfigError(f'expected a number, got {value!r}', path)
        number = float(value)
        if math.isnan(number):
            raise ConfigError('expected a number, got nan', path)
        return number
    return value


def _build(cls: Type, data: Any, path: str) -> Any:
    if not isinstance(data, Mapping):
        raise ConfigError(f'expected an object, got {type(data).__name__}', path or '<root>')
    hints = typing.get_type_hints(cls)
    names = {f.name for f in fields(cls)}
    for key in data:
        if key not in names:
            raise ConfigError('unknown configuration key', f'{path}.{key}' if path else key)

    kwargs = {}
    for name, value in data.items():
        child = f'{path}.{name}' if path else name
        try:
            kwargs[name] = _coerce(value, hints[name], child)
        except (TypeError, ValueError) as err:
            if isinstance(err, ConfigError):
                raise
            raise ConfigError(str(err), child) from err
    try:
        return cls(**kwargs)
    except DomainError as err:
        raise ConfigError(str(err), path or '<root>') from err


PRESETS: Dict[str, Config] = {
    'paper-2024': Config(
        tuning=SensorTuning(
            radar=TuningCoefficients(eta_rain=1.163, eta_fog=0.0199),
            lidar=TuningCoefficients(eta_rain=1.163, eta_fog=0.199),
        )
    ),
    'baseline': Config(),
}


def load_config(name_or_path: Optional[str] = None) -> Config:
    """Loads a named preset or a JSON file; ``None`` gives the ``paper-2024`` preset."""
    if name_or_path is None:
        return PRESETS['paper-2024']
    if name_or_path in PRESETS:
        return PRESETS[name_or_path]
    with open(name_or_path, encoding='utf-8') as fp:
        try:
            data = json.load(fp)
        except json.JSONDecodeError as err:
            raise ConfigError(f'invalid JSON ({err.msg} at line {err.lineno})', name_or_path) from err
    return Config.from_dict(data)


def save_config(config: Config, path: str) -> None:
    with open(path, 'w', encoding='utf-8') as fp:
        json.dump(config.to_dict(), fp, indent=2)
        fp.write('\n')
