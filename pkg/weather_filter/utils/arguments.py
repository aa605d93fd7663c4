import typing
from argparse import ArgumentParser, Namespace
from dataclasses import dataclass, fields, is_dataclass
from typing import Any, Callable, Dict, List, Optional, Union

from weather_filter.models.sensors import GainProfile


@dataclass(frozen=True)
class SpecArg:
    """Dataclass to represent one overridable field of a specification
    """
    name: str
    type: Callable[[str], Any]
    default: Any
    context: Optional[str] = None


class SpecArgumentParser(ArgumentParser):
    """
    Extension of argparse.ArgumentParser that exposes the fields of specification dataclasses as dotted flags.

    Flags default to ``None`` so that only the values given on the command line override a loaded configuration.

    Example::

        from weather_filter.models.sensors import RadarSpec, TargetSpec
        from weather_filter.utils.arguments import SpecArgumentParser

        parser = SpecArgumentParser()
        parser.add_spec_args("radar", RadarSpec)
        parser.add_spec_args("target", TargetSpec)
        args = parser.parse_spec_args(["--target.reflectance", "0"])

        # args.spec_overrides -> {"target.reflectance": 0.0}
    """

    def __init__(self, *args: Any, **kwargs: Any) -> None:
        super().__init__(*args, **kwargs)
        self._spec_args: Dict[str, List[SpecArg]] = {}

    def add_spec_args(self, name: str, cls: Any) -> None:
        spec_args = gather_spec_args(cls)
        self._spec_args[name] = spec_args
        group = self.add_argument_group(f'{name} overrides')
        for arg in spec_args:
            flag = f'{name}.{arg.name}'
            group.add_argument(
                f'--{flag}',
                dest=flag,
                type=arg.type,
                default=None,
                metavar=arg.type.__name__.upper() if arg.type in (int, float) else 'PATH',
                help=f'overrides {flag} (default of {arg.context}: {arg.default})',
            )

    def parse_spec_args(self, *args: Any, **kwargs: Any) -> Namespace:
        namespace = self.parse_args(*args, **kwargs)
        namespace.spec_overrides = spec_overrides(namespace)
        return namespace


def spec_overrides(namespace: Namespace) -> Dict[str, Any]:
    """Dotted flags that were given, including those of sub-commands parsed into the same namespace."""
    return {key: value for key, value in vars(namespace).items() if '.' in key and value is not None}


def _scalar_type(annotation: Any) -> Optional[Callable[[str], Any]]:
    if typing.get_origin(annotation) is Union:
        options = [arg for arg in typing.get_args(annotation) if arg is not type(None)]
        annotation = options[0] if len(options) == 1 else None
    if annotation in (int, float):
        return annotation
    if annotation is GainProfile:
        return GainProfile.from_csv
    return None


def gather_spec_args(cls: Any) -> List[SpecArg]:
    """Fields of a dataclass that can be set from a single command line token."""
    if not is_dataclass(cls):
        raise TypeError(f'{cls!r} is not a dataclass')

    hints = typing.get_type_hints(cls)
    defaults = cls()
    arguments = []
    for f in fields(cls):
        arg_type = _scalar_type(hints[f.name])
        # tuples, nested specs and the like are left to the configuration file
        if arg_type is None:
            continue
        arguments.append(SpecArg(name=f.name, type=arg_type, default=getattr(defaults, f.name), context=cls.__name__))
    return arguments
