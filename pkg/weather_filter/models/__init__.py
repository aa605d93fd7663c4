from weather_filter.models.attenuation import (  # noqa: F401
    attenuation_curve,
    AttenuationParams,
    CLEAR,
    fog_attenuation,
    fog_density,
    rain_attenuation,
    SensorKind,
    total_attenuation,
    TuningCoefficients,
    WeatherCondition,
)
from weather_filter.models.link_budget import (  # noqa: F401
    fov_map,
    free_space_range,
    lidar_received_power,
    predict_range,
    radar_received_power,
    solve_max_range,
    SolverGrid,
)
from weather_filter.models.sensors import GainProfile, LidarSpec, RadarSpec, SensorSpec, TargetSpec  # noqa: F401

__all__ = [
    "attenuation_curve",
    "AttenuationParams",
    "CLEAR",
    "fog_attenuation",
    "fog_density",
    "rain_attenuation",
    "SensorKind",
    "total_attenuation",
    "TuningCoefficients",
    "WeatherCondition",
    "fov_map",
    "free_space_range",
    "lidar_received_power",
    "predict_range",
    "radar_received_power",
    "solve_max_range",
    "SolverGrid",
    "GainProfile",
    "LidarSpec",
    "RadarSpec",
    "SensorSpec",
    "TargetSpec",
]
