"""Constrained path cost.

The cost of a path is its length inflated by the constraint violations::

    Z = length * (1 + beta * (collision + velocity [+ acceleration]))

Every violation term is a mean over path samples, so all terms are dimensionless
and lie in [0, 1] per obstacle or constraint. The array helpers accept any number
of leading batch axes, which lets the planner price a whole swarm in one call.
"""

import logging
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from swarmpath.planning.spline import SampledPath, path_length_of
from swarmpath.planning.workspace import Workspace

logger = logging.getLogger(__name__)


class CostConfig(BaseModel):
    """Penalty coefficient and actuator limits."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    beta_p: float = Field(150.0, ge=0, description="Penalty coefficient")
    v_max: float = Field(0.2, gt=0, description="Speed limit [m/s]")
    a_max: float = Field(0.02, gt=0, description="Acceleration limit [m/s^2]")
    use_acceleration_constraint: bool = False
    inflate_obstacles: bool = False
    robot_radius: float = Field(0.0725, ge=0, description="Obstacle inflation when enabled [m]")

    @property
    def inflation(self) -> float:
        return self.robot_radius if self.inflate_obstacles else 0.0


@dataclass(frozen=True)
class CostBreakdown:
    length: float
    collision: float
    velocity: float
    acceleration: float
    total: float

    @property
    def collision_free(self) -> bool:
        return self.collision == 0.0


# ---------------------------------------------------------------------------
# Pointwise penalties
# ---------------------------------------------------------------------------


def collision_penalty(d, r_obs):
    """Linear penetration penalty, 1 at the center and 0 from the boundary outwards."""
    return np.maximum(1.0 - np.asarray(d, dtype=float) / r_obs, 0.0)


def _limit_penalty(magnitude: np.ndarray, limit: float) -> np.ndarray:
    ratio = np.divide(limit, magnitude, out=np.ones_like(magnitude), where=magnitude > 0)
    return np.maximum(1.0 - ratio, 0.0)


def _norms(vectors: np.ndarray) -> np.ndarray:
    return np.hypot(vectors[..., 0], vectors[..., 1])


# ---------------------------------------------------------------------------
# Array forms (batch axes first)
# ---------------------------------------------------------------------------


def collision_terms(
    points: np.ndarray, centers: np.ndarray, radii: np.ndarray
) -> float | np.ndarray:
    """Sum over obstacles of the mean penalty over all samples."""
    if len(radii) == 0:
        return np.zeros(points.shape[:-2])
    offsets = points[..., :, None, :] - centers
    distances = np.hypot(offsets[..., 0], offsets[..., 1])
    penalties = np.maximum(1.0 - distances / radii, 0.0)
    return penalties.mean(axis=-2).sum(axis=-1)


def velocity_terms(first: np.ndarray, v_max: float) -> float | np.ndarray:
    return _limit_penalty(_norms(first), v_max).mean(axis=-1)


def acceleration_terms(second: np.ndarray, a_max: float) -> float | np.ndarray:
    return _limit_penalty(_norms(second), a_max).mean(axis=-1)


def cost_terms(
    points: np.ndarray,
    first: np.ndarray,
    second: np.ndarray,
    ws: Workspace,
    cfg: CostConfig,
) -> dict[str, np.ndarray]:
    """Length, violations and total cost for one path or a batch of paths."""
    length = path_length_of(points)
    collision = collision_terms(points, ws.obstacle_centers, ws.obstacle_radii + cfg.inflation)
    velocity = velocity_terms(first, cfg.v_max)
    if cfg.use_acceleration_constraint:
        acceleration = acceleration_terms(second, cfg.a_max)
    else:
        acceleration = np.zeros_like(velocity)
    violation = collision + velocity + acceleration
    total = length * (1.0 + cfg.beta_p * violation)
    return {
        "length": length,
        "collision": collision,
        "velocity": velocity,
        "acceleration": acceleration,
        "total": total,
    }


# ---------------------------------------------------------------------------
# Single-path operations
# ---------------------------------------------------------------------------


def path_collision_violation(path: SampledPath, ws: Workspace, inflation: float = 0.0) -> float:
    """Collision violation of a path: per obstacle, mean penalty over every sample, summed."""
    return float(collision_terms(path.points, ws.obstacle_centers, ws.obstacle_radii + inflation))


def speed_profile(path: SampledPath) -> np.ndarray:
    """Translational speed at every sample."""
    return _norms(path.first_derivatives)


def acceleration_profile(path: SampledPath) -> np.ndarray:
    """Acceleration magnitude at every sample."""
    return _norms(path.second_derivatives)


def velocity_violation(path: SampledPath, v_max: float) -> float:
    """Mean of max(1 - v_max/|v|, 0); stationary samples contribute 0."""
    return float(velocity_terms(path.first_derivatives, v_max))


def acceleration_violation(path: SampledPath, a_max: float) -> float:
    """Mean of max(1 - a_max/|a|, 0); samples with zero acceleration contribute 0."""
    return float(acceleration_terms(path.second_derivatives, a_max))


def path_cost(path: SampledPath, ws: Workspace, cfg: CostConfig) -> CostBreakdown:
    """Full cost breakdown of a sampled path."""
    terms = cost_terms(path.points, path.first_derivatives, path.second_derivatives, ws, cfg)
    return CostBreakdown(**{name: float(value) for name, value in terms.items()})