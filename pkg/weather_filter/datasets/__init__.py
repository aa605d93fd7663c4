from weather_filter.datasets.frames import (  # noqa: F401
    Frame,
    read_captures,
    read_frames,
    TargetBox,
    write_captures,
    write_frames,
)
from weather_filter.datasets.summary import (  # noqa: F401
    MeasurementSummary,
    PAPER_POSITIONS,
    read_summaries,
    SummaryRow,
    write_summaries,
)
from weather_filter.datasets.synthetic_dataset import generate_synthetic, SyntheticPedestrianDataset  # noqa: F401

__all__ = [
    "Frame",
    "read_captures",
    "read_frames",
    "TargetBox",
    "write_captures",
    "write_frames",
    "MeasurementSummary",
    "PAPER_POSITIONS",
    "read_summaries",
    "SummaryRow",
    "write_summaries",
    "generate_synthetic",
    "SyntheticPedestrianDataset",
]
