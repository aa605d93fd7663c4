"""
Frames of 3D detection points and the box around the target, plus the Frame CSV format.

Frame CSV has the header ``frame,t,x,y,z`` and one row per point. A frame without any point is written as a single
row with empty coordinates so that it survives a round trip.

A capture manifest (``d_p,frames``) lists one Frame CSV per target position.
"""
import os
from dataclasses import dataclass, replace
from typing import Dict, List, Mapping, Sequence

import numpy as np
import pandas as pd
import torch

from weather_filter.models.sensors import TargetSpec
from weather_filter.utils.exceptions import DomainError

FRAME_COLUMNS = ['frame', 't', 'x', 'y', 'z']
CAPTURE_COLUMNS = ['d_p', 'frames']


@dataclass(frozen=True, eq=False)
class Frame:
    """
    Detection points of one measurement instant, ``points`` is an ``N x 3`` tensor in sensor coordinates
    with ``x`` along boresight.
    """
    frame_index: int
    timestamp: float
    points: torch.Tensor

    def __post_init__(self) -> None:
        points = torch.as_tensor(self.points, dtype=torch.float64).reshape(-1, 3)
        object.__setattr__(self, 'points', points)

    def __len__(self) -> int:
        return self.points.shape[0]

    def with_points(self, points: torch.Tensor) -> 'Frame':
        return Frame(self.frame_index, self.timestamp, points)


@dataclass(frozen=True)
class TargetBox:
    """
    Axis-aligned volume around a target standing ``center_distance_m`` ahead of the sensor.

    Example:

        >>> box = TargetBox(center_distance_m=9.0, width_m=0.4, length_m=0.3, height_m=1.8, margin_m=0.2)
        >>> box.bounds()
        tensor([[ 8.6500, -0.4000,  0.0000],
                [ 9.3500,  0.4000,  2.0000]], dtype=torch.float64)
    """
    center_distance_m: float
    width_m: float = 0.4
    length_m: float = 0.3
    height_m: float = 1.8
    margin_m: float = 0.2

    def __post_init__(self) -> None:
        for name in ('width_m', 'length_m', 'height_m'):
            if not getattr(self, name) > 0:
                raise DomainError(f'TargetBox.{name} must be > 0, got {getattr(self, name)}')
        if not self.margin_m >= 0:
            raise DomainError(f'TargetBox.margin_m must be >= 0, got {self.margin_m}')

    @classmethod
    def from_target(cls, target: TargetSpec, center_distance_m: float, margin_m: float = 0.2) -> 'TargetBox':
        return cls(center_distance_m, target.width_m, target.length_m, target.height_m, margin_m)

    def bounds(self) -> torch.Tensor:
        """``2 x 3`` tensor holding the lower and upper corner."""
        half_l = self.length_m / 2 + self.margin_m
        half_w = self.width_m / 2 + self.margin_m
        return torch.tensor(
            [
                [self.center_distance_m - half_l, -half_w, 0.0],
                [self.center_distance_m + half_l, half_w, self.height_m + self.margin_m],
            ],
            dtype=torch.float64,
        )

    def core(self) -> 'TargetBox':
        """The target volume without margin."""
        return replace(self, margin_m=0.0)

    def contains(self, points: torch.Tensor) -> torch.Tensor:
        """Boolean mask of the points inside the box, borders included."""
        bounds = self.bounds()
        return ((points >= bounds[0]) & (points <= bounds[1])).all(dim=-1)


def validate_stream(frames: Sequence[Frame]) -> None:
    for prev, cur in zip(frames, frames[1:]):
        if cur.frame_index <= prev.frame_index:
            raise DomainError(f'frame indices must be strictly increasing, got {prev.frame_index} -> {cur.frame_index}')
        if cur.timestamp < prev.timestamp:
            raise DomainError(f'timestamps must be non-decreasing, got {prev.timestamp} -> {cur.timestamp}')


def read_frames(path: str) -> List[Frame]:
    """Reads a Frame CSV into a validated list of frames."""
    data = pd.read_csv(path, skipinitialspace=True)
    missing = set(FRAME_COLUMNS) - set(data.columns)
    if missing:
        raise DomainError(f'frame file {path} lacks columns {sorted(missing)}')
    if not data['frame'].is_monotonic_increasing:
        raise DomainError(f'frames in {path} must be ordered by frame index')

    frames = []
    for index, rows in data.groupby('frame', sort=True):
        coords = rows[['x', 'y', 'z']].dropna().to_numpy(dtype=np.float64)
        frames.append(Frame(int(index), float(rows['t'].iloc[0]), torch.from_numpy(coords)))
    validate_stream(frames)
    return frames


def write_frames(frames: Sequence[Frame], path: str) -> None:
    parts = []
    for frame in frames:
        coords = frame.points.numpy() if len(frame) else np.full((1, 3), np.nan)
        part = pd.DataFrame(coords, columns=['x', 'y', 'z'])
        part.insert(0, 't', frame.timestamp)
        part.insert(0, 'frame', frame.frame_index)
        parts.append(part)
    table = pd.concat(parts, ignore_index=True) if parts else pd.DataFrame(columns=FRAME_COLUMNS)
    table.to_csv(path, index=False, float_format='%.6f')


def read_captures(path: str) -> Dict[float, List[Frame]]:
    """
    Reads a capture manifest with columns ``d_p, frames``, one Frame CSV per target position.

    Frame paths are resolved relative to the manifest.
    """
    manifest = pd.read_csv(path, skipinitialspace=True)
    missing = set(CAPTURE_COLUMNS) - set(manifest.columns)
    if missing:
        raise DomainError(f'capture manifest {path} lacks columns {sorted(missing)}')
    if manifest['d_p'].duplicated().any():
        raise DomainError(f'capture manifest {path} lists a position twice')

    root = os.path.dirname(os.path.abspath(path))
    return {
        float(record['d_p']): read_frames(os.path.join(root, str(record['frames'])))
        for record in manifest.to_dict('records')
    }


def write_captures(captures: Mapping[float, str], path: str) -> None:
    """Writes a capture manifest pointing from each position to its Frame CSV."""
    table = pd.DataFrame(sorted(captures.items()), columns=CAPTURE_COLUMNS)
    table.to_csv(path, index=False)
