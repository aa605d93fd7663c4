"""
Detection statistics on streams of point-cloud frames
"""
import math
from dataclasses import dataclass
from typing import List, Mapping, Optional, Sequence, Tuple, Union

import torch
from pytorch_lightning.utilities import rank_zero_warn

from weather_filter.datasets.frames import Frame, TargetBox, validate_stream
from weather_filter.datasets.summary import MeasurementSummary, SummaryRow
from weather_filter.models.attenuation import SensorKind, WeatherCondition
from weather_filter.models.sensors import TargetSpec
from weather_filter.utils.exceptions import DomainError

#: Upper bound of a detection interval whose last position was still detected.
UNBOUNDED: float = math.inf


def filter_recurring(frames: Sequence[Frame], eps: float = 0.1) -> List[Frame]:
    """
    Keeps the points of each frame that have a neighbour within ``eps`` meters in the preceding frame.

    The first frame has no predecessor and is dropped from the output.

    Example:

        >>> static = torch.tensor([[9.0, 0.0, 1.0]])
        >>> frames = [Frame(i, 0.1 * i, static) for i in range(3)]
        >>> [len(frame) for frame in filter_recurring(frames)]
        [1, 1]
    """
    if not eps > 0:
        raise DomainError(f'eps must be > 0, got {eps}')
    if len(frames) < 2:
        raise DomainError(f'at least two frames are needed to find recurring points, got {len(frames)}')
    validate_stream(frames)

    recurring = []
    for prev, cur in zip(frames, frames[1:]):
        if len(prev) == 0 or len(cur) == 0:
            recurring.append(cur.with_points(cur.points[:0]))
            continue
        distances = torch.cdist(cur.points, prev.points)
        keep = (distances <= eps).any(dim=1)
        recurring.append(cur.with_points(cur.points[keep]))
    return recurring


def count_in_box(frames: Sequence[Frame], box: TargetBox, exclude: Optional[TargetBox] = None) -> torch.Tensor:
    """
    Number of points per frame inside ``box``, points inside ``exclude`` left out.

    Example:

        >>> box = TargetBox(center_distance_m=9.0)
        >>> frames = [Frame(0, 0.0, torch.tensor([[9.0, 0.0, 1.0], [15.0, 0.0, 1.0]]))]
        >>> count_in_box(frames, box)
        tensor([1])
    """
    counts = []
    for frame in frames:
        mask = box.contains(frame.points)
        if exclude is not None:
            mask &= ~exclude.contains(frame.points)
        counts.append(int(mask.sum()))
    return torch.tensor(counts, dtype=torch.long)


def summarize(counts: Union[torch.Tensor, Sequence[float]]) -> Tuple[float, float]:
    """
    Mean count over all frames and the population standard deviation.

    Example:

        >>> n_bar, sigma = summarize([3, 4, 5])
        >>> n_bar, round(sigma, 4)
        (4.0, 0.8165)
    """
    counts = torch.as_tensor(counts, dtype=torch.float64).flatten()
    if counts.numel() == 0:
        raise DomainError('cannot summarize an empty list of counts')
    n_bar = counts.mean()
    sigma = ((counts - n_bar)**2).mean().sqrt()
    return float(n_bar), float(sigma)


def backscatter_compensate(n_bar_target: float, n_bar_freespace: float) -> float:
    """
    Removes the false positives of a free-space run from the target run, clamped at zero.

    >>> backscatter_compensate(12.0, 2.5)
    9.5
    """
    if n_bar_target < 0 or n_bar_freespace < 0:
        raise DomainError('detection counts must be >= 0')
    return max(0.0, n_bar_target - n_bar_freespace)


def is_detected(n_bar: float, m: float) -> bool:
    """A target counts as detected once its mean recurring count reaches ``m``."""
    if not m >= 1:
        raise DomainError(f'the minimum number of detection points must be >= 1, got {m}')
    return n_bar >= m


@dataclass(frozen=True)
class DetectionInterval:
    """
    Measured maximum range as ``[lower, upper)``.

    ``lower`` is the furthest detected position, ``upper`` the next measured one or ``UNBOUNDED``.
    Both are ``None`` when no position was detected.
    """
    lower: Optional[float] = None
    upper: Optional[float] = None

    @property
    def is_empty(self) -> bool:
        return self.lower is None

    @property
    def is_bounded(self) -> bool:
        return self.upper is not None and math.isfinite(self.upper)

    def midpoint(self) -> Optional[float]:
        if self.is_empty:
            return None
        return (self.lower + self.upper) / 2 if self.is_bounded else self.lower


def max_detected_distance(summary: MeasurementSummary, m: float) -> DetectionInterval:
    """
    Interval between the furthest detected position and the next measured one, excluded rows skipped.

    Example:

        >>> rows = [SummaryRow(d, n) for d, n in [(3.0, 5.0), (9.0, 2.0), (15.0, 0.0)]]
        >>> max_detected_distance(MeasurementSummary('radar', WeatherCondition(), rows), m=1)
        DetectionInterval(lower=9.0, upper=15.0)
    """
    rows = summary.active_rows()
    detected = [row.d_p for row in rows if is_detected(row.n_bar, m)]
    if not detected:
        return DetectionInterval()
    lower = max(detected)
    further = [row.d_p for row in rows if row.d_p > lower]
    return DetectionInterval(lower, min(further) if further else UNBOUNDED)


def summarize_capture(
    frames: Sequence[Frame],
    box: TargetBox,
    eps: float = 0.1,
    freespace_frames: Optional[Sequence[Frame]] = None,
) -> SummaryRow:
    """
    Statistics of one target position: recurring filter, box count and summary.

    When ``freespace_frames`` of a run without the target are given, their mean count in the margin of the
    box, the target volume itself left out, is subtracted from the mean. The spread is left untouched.
    """
    n_bar, sigma = summarize(count_in_box(filter_recurring(frames, eps), box))
    if freespace_frames is not None:
        n_free, _ = summarize(count_in_box(filter_recurring(freespace_frames, eps), box, exclude=box.core()))
        if n_free > n_bar:
            rank_zero_warn(f'free-space count {n_free:.2f} exceeds the target count at {box.center_distance_m} m')
        n_bar = backscatter_compensate(n_bar, n_free)
    return SummaryRow(box.center_distance_m, n_bar, sigma)


def summarize_captures(
    captures: Mapping[float, Sequence[Frame]],
    sensor_kind: SensorKind,
    condition: WeatherCondition,
    target: Optional[TargetSpec] = None,
    eps: float = 0.1,
    margin_m: float = 0.2,
    freespace_frames: Optional[Sequence[Frame]] = None,
) -> MeasurementSummary:
    """
    Builds the summary of a measurement campaign, one capture per target position.

    Backscatter compensation applies to lidar only, radar free-space runs are ignored.
    """
    sensor_kind = SensorKind(sensor_kind)
    target = target or TargetSpec()
    if sensor_kind is SensorKind.RADAR and freespace_frames is not None:
        rank_zero_warn('backscatter compensation is not applied to radar, ignoring the free-space run')
        freespace_frames = None
    rows = [
        summarize_capture(frames, TargetBox.from_target(target, d_p, margin_m), eps, freespace_frames)
        for d_p, frames in sorted(captures.items())
    ]
    return MeasurementSummary(sensor_kind, condition, tuple(rows))
