import pytest

from weather_filter.config import load_config
from weather_filter.models.link_budget import SolverGrid
from weather_filter.models.sensors import LidarSpec, RadarSpec, TargetSpec


@pytest.fixture
def radar():
    return RadarSpec()


@pytest.fixture
def lidar():
    return LidarSpec()


@pytest.fixture
def target():
    return TargetSpec()


@pytest.fixture(scope="session")
def tuned_config():
    return load_config('paper-2024')


@pytest.fixture(scope="session")
def fine_grid():
    """Solver grid tight enough that solver error stays far below calibration tolerances."""
    return SolverGrid(xtol_m=1e-10)
