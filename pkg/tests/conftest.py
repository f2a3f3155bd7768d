"""Shared fixtures for the swarmpath test suite."""

import numpy as np
import pytest

from swarmpath.planning.cost import CostConfig
from swarmpath.planning.pso import PsoConfig
from swarmpath.planning.spline import ControlPolygon, SampledPath, SplineConfig, sample_path
from swarmpath.planning.workspace import Obstacle, Workspace
from swarmpath.robot.model import RobotParams


@pytest.fixture
def params() -> RobotParams:
    return RobotParams()


@pytest.fixture
def empty_ws() -> Workspace:
    return Workspace(start=(0.2, 0.2), target=(3.8, 3.8), name="empty")


@pytest.fixture
def blocked_ws() -> Workspace:
    """One obstacle sitting on the start-target diagonal."""
    return Workspace(
        start=(0.3, 0.3),
        target=(3.7, 3.7),
        obstacles=(Obstacle(center_x=2.0, center_y=2.0, radius=0.5),),
        name="blocked",
    )


@pytest.fixture
def fast_spline() -> SplineConfig:
    return SplineConfig(smoothness_K=3, sample_count_N=60, path_time_T=50.0)


@pytest.fixture
def fast_pso() -> PsoConfig:
    return PsoConfig(iter_max=30, pop_max=12, n_control_points=3, seed=7)


@pytest.fixture
def cost_cfg() -> CostConfig:
    return CostConfig()


def straight_path(
    start=(0.0, 0.0), target=(3.0, 4.0), duration: float = 50.0, samples: int = 200
) -> SampledPath:
    """Uniform-speed straight segment (quadratic spline through the midpoint)."""
    start = np.asarray(start, dtype=float)
    target = np.asarray(target, dtype=float)
    polygon = ControlPolygon(
        ((start + target) / 2.0).reshape(1, 2), tuple(start), tuple(target)
    )
    cfg = SplineConfig(smoothness_K=3, sample_count_N=samples, path_time_T=duration)
    return sample_path(polygon, cfg)


@pytest.fixture
def segment() -> SampledPath:
    return straight_path()
