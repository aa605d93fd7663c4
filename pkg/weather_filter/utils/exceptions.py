"""
Exceptions raised across the weather filter package
"""


class WeatherFilterError(Exception):
    """Base class for every error raised by this package."""


class DomainError(WeatherFilterError, ValueError):
    """An input lies outside the domain of the model, e.g. a negative rain rate."""


class ModelMisuseError(WeatherFilterError, RuntimeError):
    """The model was evaluated in a way that breaks its assumptions, e.g. a non-monotone power function."""


class ConfigError(WeatherFilterError, ValueError):
    """Malformed configuration. ``path`` names the offending dotted key when known."""

    def __init__(self, message: str, path: str = '') -> None:
        self.path = path
        super().__init__(f'{path}: {message}' if path else message)


class CalibrationError(WeatherFilterError, ValueError):
    """The calibration problem is ill-posed, e.g. fewer observations than free variables."""


class ConvergenceError(WeatherFilterError, RuntimeError):
    """The optimizer ran out of evaluations before converging."""
