from weather_filter.metrics.detection import (  # noqa: F401
    backscatter_compensate,
    count_in_box,
    DetectionInterval,
    filter_recurring,
    is_detected,
    max_detected_distance,
    summarize,
    summarize_capture,
    summarize_captures,
)

__all__ = [
    "backscatter_compensate",
    "count_in_box",
    "DetectionInterval",
    "filter_recurring",
    "is_detected",
    "max_detected_distance",
    "summarize",
    "summarize_capture",
    "summarize_captures",
]
