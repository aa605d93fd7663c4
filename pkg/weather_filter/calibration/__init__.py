from weather_filter.calibration.problem import (  # noqa: F401
    CalibrationProblem,
    EXCLUSION_PRESETS,
    objective,
    Observation,
    observations_from_summaries,
)
from weather_filter.calibration.regression import (  # noqa: F401
    calibrate,
    calibrate_two_stage,
    CalibrationResult,
    fit_report,
    starting_points,
)

__all__ = [
    "CalibrationProblem",
    "EXCLUSION_PRESETS",
    "objective",
    "Observation",
    "observations_from_summaries",
    "calibrate",
    "calibrate_two_stage",
    "CalibrationResult",
    "fit_report",
    "starting_points",
]
