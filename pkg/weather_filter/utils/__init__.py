from weather_filter.utils.exceptions import (  # noqa: F401
    CalibrationError,
    ConfigError,
    ConvergenceError,
    DomainError,
    ModelMisuseError,
    WeatherFilterError,
)

__all__ = [
    "CalibrationError",
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "ModelMisuseError",
    "WeatherFilterError",
]
