import math

import pandas as pd
import pytest
import torch

from weather_filter.datasets import (
    Frame,
    MeasurementSummary,
    read_captures,
    read_frames,
    read_summaries,
    SummaryRow,
    SyntheticPedestrianDataset,
    write_captures,
    write_frames,
    write_summaries,
)
from weather_filter.datasets.synthetic_dataset import generate_synthetic, TRUTH_COLUMNS
from weather_filter.metrics.detection import DetectionInterval, max_detected_distance, summarize_captures, UNBOUNDED
from weather_filter.models.attenuation import WeatherCondition
from weather_filter.models.link_budget import predict_range
from weather_filter.models.sensors import LidarSpec, RadarSpec, TargetSpec
from weather_filter.utils.exceptions import DomainError


def _frames():
    return [
        Frame(0, 0.0, torch.tensor([[9.0, 0.0, 1.0], [9.1, 0.1, 1.2]])),
        Frame(1, 0.1, torch.zeros(0, 3)),
        Frame(3, 0.3, torch.tensor([[15.5, -0.25, 0.75]])),
    ]


def test_frame_csv_round_trip(tmp_path):
    path = str(tmp_path / 'frames.csv')
    write_frames(_frames(), path)
    frames = read_frames(path)
    assert [f.frame_index for f in frames] == [0, 1, 3]
    assert [len(f) for f in frames] == [2, 0, 1]
    assert frames[2].timestamp == pytest.approx(0.3)
    torch.testing.assert_close(frames[0].points, _frames()[0].points, rtol=0.0, atol=1e-6)


def test_frame_csv_header(tmp_path):
    path = str(tmp_path / 'frames.csv')
    write_frames(_frames(), path)
    assert list(pd.read_csv(path).columns) == ['frame', 't', 'x', 'y', 'z']


def test_read_frames_missing_column(tmp_path):
    path = tmp_path / 'frames.csv'
    path.write_text('frame,t,x,y\n0,0.0,1.0,2.0\n')
    with pytest.raises(DomainError, match='lacks columns'):
        read_frames(str(path))


def test_read_frames_unordered(tmp_path):
    path = tmp_path / 'frames.csv'
    path.write_text('frame,t,x,y,z\n1,0.1,9.0,0.0,1.0\n0,0.0,9.0,0.0,1.0\n')
    with pytest.raises(DomainError):
        read_frames(str(path))


def test_read_frames_decreasing_timestamps(tmp_path):
    path = tmp_path / 'frames.csv'
    path.write_text('frame,t,x,y,z\n0,0.5,9.0,0.0,1.0\n1,0.1,9.0,0.0,1.0\n')
    with pytest.raises(DomainError, match='timestamps'):
        read_frames(str(path))


def test_captures_manifest_resolves_relative_paths(tmp_path):
    sub = tmp_path / 'run'
    sub.mkdir()
    write_frames(_frames(), str(sub / 'position_9m.csv'))
    write_frames(_frames()[:2], str(sub / 'position_15m.csv'))
    manifest = str(sub / 'captures.csv')
    write_captures({15.0: 'position_15m.csv', 9.0: 'position_9m.csv'}, manifest)

    captures = read_captures(manifest)
    assert sorted(captures) == [9.0, 15.0]
    assert len(captures[9.0]) == 3
    assert len(captures[15.0]) == 2


def test_captures_manifest_duplicate_position(tmp_path):
    path = tmp_path / 'captures.csv'
    path.write_text('d_p,frames\n9,a.csv\n9,b.csv\n')
    with pytest.raises(DomainError, match='twice'):
        read_captures(str(path))


def test_summary_csv_round_trip(tmp_path):
    summaries = [
        MeasurementSummary('radar', WeatherCondition(), (SummaryRow(3.0, 5.0, 0.5), SummaryRow(9.0, 0.0))),
        MeasurementSummary(
            'lidar', WeatherCondition(rain_rate=16.0), (SummaryRow(15.0, 12.0, 1.0, excluded=True), )
        ),
    ]
    path = str(tmp_path / 'summary.csv')
    write_summaries(summaries, path)
    assert read_summaries(path) == summaries
    assert read_summaries(path, sensor_kind='lidar') == summaries[1:]
    assert 'inf' in (tmp_path / 'summary.csv').read_text()


def test_summary_rows_sorted_and_unique():
    summary = MeasurementSummary('radar', WeatherCondition(), (SummaryRow(9.0, 1.0), SummaryRow(3.0, 2.0)))
    assert [row.d_p for row in summary.rows] == [3.0, 9.0]
    with pytest.raises(DomainError):
        MeasurementSummary('radar', WeatherCondition(), (SummaryRow(9.0, 1.0), SummaryRow(9.0, 2.0)))


def test_summary_exclusions():
    summary = MeasurementSummary(
        'radar', WeatherCondition(rain_rate=16.0), (SummaryRow(9.0, 1.0), SummaryRow(15.0, 1.0))
    )
    flagged = summary.with_exclusions([lambda condition, d_p: condition.rain_rate > 0 and d_p == 15.0])
    assert [row.d_p for row in flagged.active_rows()] == [9.0]
    assert flagged.excluded == frozenset({(WeatherCondition(rain_rate=16.0), 15.0)})


@pytest.mark.parametrize(
    "kwargs", [dict(d_p=0.0, n_bar=1.0), dict(d_p=3.0, n_bar=-1.0), dict(d_p=3.0, n_bar=1.0, sigma=-1.0)]
)
def test_summary_row_validation(kwargs):
    with pytest.raises(DomainError):
        SummaryRow(**kwargs)


def test_synthetic_ds():
    ds = SyntheticPedestrianDataset(positions=(9.0, 15.0), cluster_size=25, num_frames=10, noise_rate=20.0)
    assert len(ds) == 2
    for d_p, frames in ds:
        assert len(frames) == 10
        assert [f.timestamp for f in frames][:2] == [0.0, 0.1]


def test_synthetic_is_deterministic():
    kwargs = dict(positions=(9.0, 15.0), dropout=0.3, noise_rate=10.0, num_frames=8, seed=7)
    _, first = SyntheticPedestrianDataset(**kwargs)[1]
    _, second = SyntheticPedestrianDataset(**kwargs)[1]
    _, other = SyntheticPedestrianDataset(**dict(kwargs, seed=8))[1]
    assert all(torch.equal(a.points, b.points) for a, b in zip(first, second))
    assert not all(len(a) == len(b) and torch.equal(a.points, b.points) for a, b in zip(first, other))


def test_synthetic_files_are_identical(tmp_path):
    kwargs = dict(dropout=0.3, noise_rate=5.0, num_frames=6, seed=3)
    first = generate_synthetic(RadarSpec(), TargetSpec(), WeatherCondition(), str(tmp_path / 'a'), **kwargs)
    second = generate_synthetic(RadarSpec(), TargetSpec(), WeatherCondition(), str(tmp_path / 'b'), **kwargs)
    for name in ('position_9m.csv', 'freespace.csv', 'truth.csv'):
        assert (tmp_path / 'a' / name).read_text() == (tmp_path / 'b' / name).read_text()
    assert first.endswith('captures.csv') and second.endswith('captures.csv')


@pytest.mark.parametrize(
    "kwargs", [
        dict(dropout=1.0),
        dict(noise_rate=-1.0),
        dict(num_frames=1),
        dict(clutter_points=9),
        dict(positions=()),
        dict(cluster_size=10_000),
    ]
)
def test_synthetic_validation(kwargs):
    with pytest.raises(DomainError):
        SyntheticPedestrianDataset(**kwargs)


def test_lossless_capture_recovers_cluster_size():
    ds = SyntheticPedestrianDataset(cluster_size=25, num_frames=10)
    summary = summarize_captures(dict(iter(ds)), 'radar', WeatherCondition())
    assert [row.n_bar for row in summary.rows] == [25.0] * len(ds)
    assert all(row.sigma == 0.0 for row in summary.rows)


def test_background_noise_stays_outside_the_box():
    ds = SyntheticPedestrianDataset(cluster_size=25, noise_rate=50.0, num_frames=10, seed=2)
    summary = summarize_captures(dict(iter(ds)), 'radar', WeatherCondition())
    expected = [row['expected_n_bar'] for row in ds.truth(m=1)]
    assert [row.n_bar for row in summary.rows] == expected


def test_not_planted_beyond_planted_range():
    ds = SyntheticPedestrianDataset(positions=(9.0, 15.0, 21.0), planted_range_m=16.0, num_frames=4)
    assert [ds.is_planted(d) for d in ds.positions] == [True, True, False]
    truth = ds.truth(m=1)
    assert [row['detected'] for row in truth] == [1, 1, 0]
    assert set(truth[0]) == set(TRUTH_COLUMNS)
    _, frames = ds[2]
    assert all(len(f) == 0 for f in frames)


def test_dropout_mean_matches_ground_truth():
    dropout, cluster = 0.3, 25
    n_bars = []
    for seed in range(100):
        ds = SyntheticPedestrianDataset(cluster_size=cluster, dropout=dropout, noise_rate=5.0, seed=seed)
        summary = summarize_captures(dict(iter(ds)), 'radar', WeatherCondition())
        n_bars += [row.n_bar for row in summary.rows]
    n_bars = torch.tensor(n_bars, dtype=torch.float64)
    expected = cluster * (1 - dropout)**2
    standard_error = n_bars.std() / math.sqrt(n_bars.numel())
    assert abs(float(n_bars.mean()) - expected) <= 3 * float(standard_error)


@pytest.mark.parametrize(
    "sensor, condition", [
        (RadarSpec(), WeatherCondition(rain_rate=50.0)),
        (RadarSpec(), WeatherCondition(rain_rate=98.0)),
        (LidarSpec(), WeatherCondition(fog_visual_range=6.0)),
    ]
)
def test_interval_matches_planted_range_for_every_seed(sensor, condition):
    reach = predict_range(sensor, TargetSpec(), condition)
    for seed in range(25):
        ds = SyntheticPedestrianDataset(dropout=0.3, noise_rate=20.0, planted_range_m=reach, seed=seed)
        summary = summarize_captures(dict(iter(ds)), sensor.kind, condition)
        planted = max(row['d_p'] for row in ds.truth(sensor.m_min) if row['detected'])
        further = [d for d in ds.positions if d > planted]
        expected = DetectionInterval(planted, min(further) if further else UNBOUNDED)
        assert max_detected_distance(summary, sensor.m_min) == expected, f'seed {seed}'


def test_lidar_clutter_is_compensated():
    ds = SyntheticPedestrianDataset(positions=(9.0, 15.0), cluster_size=25, clutter_points=4, num_frames=6)
    captures = dict(iter(ds))
    raw = summarize_captures(captures, 'lidar', WeatherCondition())
    compensated = summarize_captures(captures, 'lidar', WeatherCondition(), freespace_frames=ds.freespace())
    assert [row.n_bar for row in raw.rows] == [29.0, 29.0]
    assert [row.n_bar for row in compensated.rows] == [25.0, 25.0]


def test_end_to_end_heavy_rain_interval(tmp_path):
    radar = RadarSpec()
    rain = WeatherCondition(rain_rate=98.0)
    manifest = generate_synthetic(radar, TargetSpec(), rain, str(tmp_path), seed=11, dropout=0.3, noise_rate=20.0)

    summary = summarize_captures(read_captures(manifest), 'radar', rain)
    interval = max_detected_distance(summary, radar.m_min)
    truth = pd.read_csv(tmp_path / 'truth.csv')
    planted = truth.loc[truth['detected'] == 1, 'd_p']

    assert interval == DetectionInterval(27.0, 33.0)
    assert interval.lower == planted.max()


def test_lidar_freespace_file_written(tmp_path):
    generate_synthetic(LidarSpec(), TargetSpec(), WeatherCondition(), str(tmp_path), num_frames=3, clutter_points=2)
    free = read_frames(str(tmp_path / 'freespace.csv'))
    assert len(free) == 3
    assert all(len(frame) == 2 * 8 for frame in free)
