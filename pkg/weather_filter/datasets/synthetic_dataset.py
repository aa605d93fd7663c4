"""
Synthetic pedestrian captures emulating the measurement protocol, with known ground truth.
"""
import math
import os
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd
import torch
from pytorch_lightning.utilities import rank_zero_info
from torch.utils.data import Dataset

from weather_filter.datasets.frames import Frame, TargetBox, write_captures, write_frames
from weather_filter.datasets.summary import PAPER_POSITIONS
from weather_filter.models.attenuation import AttenuationParams, TuningCoefficients, WeatherCondition
from weather_filter.models.link_budget import predict_range, SolverGrid
from weather_filter.models.sensors import SensorSpec, TargetSpec
from weather_filter.utils.exceptions import DomainError

TRUTH_COLUMNS = ['d_p', 'planted', 'cluster_size', 'expected_n_bar', 'clutter', 'detected']

#: Scene volume ``[[x_min, y_min, z_min], [x_max, y_max, z_max]]`` in which background noise is drawn.
SCENE_BOUNDS: Tuple[Tuple[float, ...], Tuple[float, ...]] = ((0.0, -2.0, 0.0), (50.0, 2.0, 3.0))

#: Spacing of the lattice the pedestrian cluster is drawn from, larger than any sensible recurring tolerance.
LATTICE_SPACING_M: float = 0.15


class SyntheticPedestrianDataset(Dataset):
    """
    One capture per target position: a static cluster of points on the pedestrian, per-point per-frame dropout,
    static clutter at the box edge and Poisson background noise outside every target box.

    A point survives the recurring filter when it is present in two consecutive frames, so the expected box
    count of a planted cluster is ``cluster_size * (1 - dropout) ** 2``.

    Example:

        >>> ds = SyntheticPedestrianDataset(positions=(9.0, 15.0), cluster_size=25, num_frames=5)
        >>> len(ds)
        2
        >>> d_p, frames = ds[0]
        >>> d_p, len(frames), len(frames[0])
        (9.0, 5, 25)
    """

    def __init__(
        self,
        positions: Sequence[float] = PAPER_POSITIONS,
        target: Optional[TargetSpec] = None,
        cluster_size: int = 25,
        dropout: float = 0.0,
        noise_rate: float = 0.0,
        clutter_points: int = 0,
        num_frames: int = 50,
        frame_rate_hz: float = 10.0,
        planted_range_m: float = math.inf,
        margin_m: float = 0.2,
        seed: int = 0,
    ):
        """
        Args:
            positions: target distances in meters, one capture each
            target: pedestrian dimensions
            cluster_size: points planted on the pedestrian
            dropout: probability that a planted point is missing from a frame
            noise_rate: mean number of background points per frame
            clutter_points: static points per box present with and without the pedestrian
            num_frames: frames per capture
            frame_rate_hz: capture frame rate
            planted_range_m: the pedestrian is only planted at positions up to this distance
            margin_m: margin of the target box kept free of background noise
            seed: seed of every random draw
        """
        super().__init__()
        if not 0 <= dropout < 1:
            raise DomainError(f'dropout must lie in [0, 1), got {dropout}')
        if noise_rate < 0:
            raise DomainError(f'noise_rate must be >= 0, got {noise_rate}')
        if num_frames < 2:
            raise DomainError(f'at least two frames per capture are needed, got {num_frames}')
        if not frame_rate_hz > 0:
            raise DomainError(f'frame_rate_hz must be > 0, got {frame_rate_hz}')
        if not 0 <= clutter_points <= 8:
            raise DomainError(f'clutter_points must lie in [0, 8], got {clutter_points}')
        if not positions or any(d <= 0 for d in positions):
            raise DomainError('positions must be a non-empty list of distances > 0')

        self.positions = tuple(sorted(float(d) for d in positions))
        self.target = target or TargetSpec()
        self.dropout = dropout
        self.noise_rate = noise_rate
        self.clutter_points = clutter_points
        self.num_frames = num_frames
        self.frame_rate_hz = frame_rate_hz
        self.planted_range_m = planted_range_m
        self.margin_m = margin_m
        self.seed = seed

        slots = self._lattice(0.0).shape[0]
        if not 0 <= cluster_size <= slots:
            raise DomainError(f'cluster_size must lie in [0, {slots}] for this target, got {cluster_size}')
        self.cluster_size = cluster_size
        self.boxes = [TargetBox.from_target(self.target, d_p, margin_m) for d_p in self.positions]

    def __len__(self) -> int:
        return len(self.positions)

    def __getitem__(self, idx: int) -> Tuple[float, List[Frame]]:
        d_p = self.positions[idx]
        generator = torch.Generator().manual_seed(self._capture_seed(idx))
        cluster = self._cluster(d_p, generator) if self.is_planted(d_p) else torch.zeros(0, 3, dtype=torch.float64)
        return d_p, self._frames(cluster, generator)

    def freespace(self) -> List[Frame]:
        """Capture of the same scene without the pedestrian."""
        generator = torch.Generator().manual_seed(self._capture_seed(len(self.positions)))
        return self._frames(torch.zeros(0, 3, dtype=torch.float64), generator)

    def is_planted(self, d_p: float) -> bool:
        return self.cluster_size > 0 and d_p <= self.planted_range_m

    def truth(self, m: float) -> List[Dict[str, float]]:
        """Ground truth per position, ``detected`` judged against the minimum point count ``m``."""
        rows = []
        for d_p in self.positions:
            planted = self.is_planted(d_p)
            expected = self.cluster_size * (1 - self.dropout)**2 if planted else 0.0
            rows.append({
                'd_p': d_p,
                'planted': int(planted),
                'cluster_size': self.cluster_size if planted else 0,
                'expected_n_bar': expected,
                'clutter': self.clutter_points,
                'detected': int(expected >= m),
            })
        return rows

    def _capture_seed(self, idx: int) -> int:
        return self.seed * 1009 + idx

    def _lattice(self, d_p: float) -> torch.Tensor:
        step = LATTICE_SPACING_M
        half_l, half_w = self.target.length_m / 2, self.target.width_m / 2
        xs = d_p + torch.arange(-math.floor(half_l / step), math.floor(half_l / step) + 1, dtype=torch.float64) * step
        ys = torch.arange(-math.floor(half_w / step), math.floor(half_w / step) + 1, dtype=torch.float64) * step
        zs = torch.arange(1, math.floor(self.target.height_m / step) + 1, dtype=torch.float64) * step
        grid = torch.stack(torch.meshgrid(xs, ys, zs), dim=-1)
        return grid.reshape(-1, 3)

    def _cluster(self, d_p: float, generator: torch.Generator) -> torch.Tensor:
        lattice = self._lattice(d_p)
        choice = torch.randperm(lattice.shape[0], generator=generator)[:self.cluster_size]
        return lattice[choice]

    def _clutter(self) -> torch.Tensor:
        if self.clutter_points == 0:
            return torch.zeros(0, 3, dtype=torch.float64)
        # outer shell of the box, clear of the lattice by more than one lattice step
        y = self.target.width_m / 2 + 0.75 * self.margin_m
        zs = 0.1 + 0.2 * torch.arange(self.clutter_points, dtype=torch.float64)
        return torch.cat([
            torch.stack([torch.full_like(zs, box.center_distance_m), torch.full_like(zs, y), zs], dim=1)
            for box in self.boxes
        ])

    def _noise(self, generator: torch.Generator) -> torch.Tensor:
        count = int(torch.poisson(torch.tensor([self.noise_rate], dtype=torch.float64), generator=generator).item())
        if count == 0:
            return torch.zeros(0, 3, dtype=torch.float64)
        low, high = torch.tensor(SCENE_BOUNDS, dtype=torch.float64)
        points = low + (high - low) * torch.rand(count, 3, generator=generator, dtype=torch.float64)
        inside = torch.stack([box.contains(points) for box in self.boxes]).any(dim=0)
        return points[~inside]

    def _frames(self, cluster: torch.Tensor, generator: torch.Generator) -> List[Frame]:
        clutter = self._clutter()
        frames = []
        for i in range(self.num_frames):
            keep = torch.rand(cluster.shape[0], generator=generator, dtype=torch.float64) >= self.dropout
            points = torch.cat([cluster[keep], clutter, self._noise(generator)])
            frames.append(Frame(i, i / self.frame_rate_hz, points))
        return frames


def generate_synthetic(
    spec: SensorSpec,
    target: TargetSpec,
    condition: WeatherCondition,
    out_dir: str,
    seed: int = 0,
    dropout: float = 0.0,
    noise_rate: float = 0.0,
    cluster_size: int = 25,
    clutter_points: int = 0,
    num_frames: int = 50,
    positions: Sequence[float] = PAPER_POSITIONS,
    params: Optional[AttenuationParams] = None,
    coeffs: Optional[TuningCoefficients] = None,
    grid: Optional[SolverGrid] = None,
) -> str:
    """
    Writes one synthetic campaign for ``spec`` under ``condition`` into ``out_dir``.

    The pedestrian is planted at every position the model predicts as reachable. Files written:
    ``captures.csv`` (manifest, returned), ``position_<d_p>m.csv`` per position, ``freespace.csv`` and ``truth.csv``.
    """
    reach = predict_range(spec, target, condition, params, coeffs, grid)
    dataset = SyntheticPedestrianDataset(
        positions=positions,
        target=target,
        cluster_size=cluster_size,
        dropout=dropout,
        noise_rate=noise_rate,
        clutter_points=clutter_points,
        num_frames=num_frames,
        planted_range_m=0.0 if reach is None else reach,
        seed=seed,
    )

    os.makedirs(out_dir, exist_ok=True)
    captures = {}
    for d_p, frames in dataset:
        name = f'position_{d_p:g}m.csv'
        write_frames(frames, os.path.join(out_dir, name))
        captures[d_p] = name
    write_frames(dataset.freespace(), os.path.join(out_dir, 'freespace.csv'))
    truth = pd.DataFrame(dataset.truth(spec.m_min), columns=TRUTH_COLUMNS)
    truth.to_csv(os.path.join(out_dir, 'truth.csv'), index=False)

    manifest = os.path.join(out_dir, 'captures.csv')
    write_captures(captures, manifest)
    rank_zero_info(f'wrote {len(dataset)} synthetic captures of the {spec.kind.value} to {out_dir}')
    return manifest
