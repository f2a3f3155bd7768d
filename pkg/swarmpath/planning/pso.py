"""Particle swarm planner over spline control points.

Each particle holds the interior control points of one candidate path as an
interleaved vector ``[x1, y1, x2, y2, ...]``. Every iteration moves the particles
under inertia, personal-best and global-best attraction, clamps them to their
search boxes and prices the whole swarm in one vectorized cost evaluation.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import psutil
from pydantic import BaseModel, ConfigDict, Field

from swarmpath.planning.cost import CostBreakdown, CostConfig, cost_terms, path_cost
from swarmpath.planning.spline import (
    ControlPolygon,
    SampledPath,
    SearchBounds,
    SplineConfig,
    control_bounds,
    finite_differences,
    sample_path,
    sample_points,
    sample_times,
)
from swarmpath.planning.workspace import Workspace
from swarmpath.rng import particle_rngs

logger = logging.getLogger(__name__)

# Iterations between progress log lines
LOG_EVERY = 50


class PsoConfig(BaseModel):
    """Swarm size, iteration budget and update coefficients."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    iter_max: int = Field(300, ge=1)
    pop_max: int = Field(100, ge=2)
    inertia_w: float = Field(0.9, gt=0, le=1)
    inertia_damping: float = Field(
        1.0, gt=0, le=1, description="Per-iteration factor on w; 1.0 keeps w constant"
    )
    c1: float = Field(2.0, ge=0)
    c2: float = Field(2.0, ge=0)
    n_control_points: int = Field(5, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)
    convergence_rel_tol: float = Field(1e-3, ge=0)
    lateral_margin: Optional[float] = Field(None, ge=0, description="Defaults to workspace extent")

    def inertia_at(self, iteration: int) -> float:
        """Inertia weight used by update number ``iteration`` (0-based)."""
        return self.inertia_w * self.inertia_damping**iteration


@dataclass(frozen=True)
class Particle:
    """Snapshot of one particle."""

    position: np.ndarray
    velocity: np.ndarray
    pbest_position: np.ndarray
    pbest_cost: float


@dataclass
class Swarm:
    """Mutable swarm state; row ``i`` of every array belongs to particle ``i``."""

    positions: np.ndarray
    velocities: np.ndarray
    costs: np.ndarray
    pbest_positions: np.ndarray
    pbest_costs: np.ndarray
    gbest_index: int
    lower: np.ndarray
    upper: np.ndarray
    rngs: list[np.random.Generator] = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.positions)

    @property
    def gbest_position(self) -> np.ndarray:
        return self.pbest_positions[self.gbest_index]

    @property
    def gbest_cost(self) -> float:
        return float(self.pbest_costs[self.gbest_index])

    def particle(self, index: int) -> Particle:
        return Particle(
            position=self.positions[index].copy(),
            velocity=self.velocities[index].copy(),
            pbest_position=self.pbest_positions[index].copy(),
            pbest_cost=float(self.pbest_costs[index]),
        )


class SwarmObjective:
    """Prices a batch of flattened control-point vectors."""

    def __init__(
        self,
        ws: Workspace,
        spline_cfg: SplineConfig,
        cost_cfg: CostConfig,
        bounds: SearchBounds,
    ) -> None:
        self.ws = ws
        self.spline_cfg = spline_cfg
        self.cost_cfg = cost_cfg
        self._start = np.asarray(bounds.start, dtype=float)
        self._target = np.asarray(bounds.target, dtype=float)
        times = sample_times(spline_cfg)
        self._h = float(times[1] - times[0])
        self.evaluations = 0

    def terms(self, positions: np.ndarray) -> dict[str, np.ndarray]:
        batch = positions.shape[0]
        interior = positions.reshape(batch, -1, 2)
        control = np.concatenate(
            [
                np.broadcast_to(self._start, (batch, 1, 2)),
                interior,
                np.broadcast_to(self._target, (batch, 1, 2)),
            ],
            axis=1,
        )
        points = sample_points(control, self.spline_cfg)
        first, second = finite_differences(points, self._h)
        self.evaluations += batch
        return cost_terms(points, first, second, self.ws, self.cost_cfg)

    def __call__(self, positions: np.ndarray) -> np.ndarray:
        return self.terms(positions)["total"]


@dataclass
class PlanResult:
    best_polygon: ControlPolygon
    best_path: SampledPath
    best_cost: CostBreakdown
    best_cost_history: np.ndarray
    mean_cost_history: np.ndarray
    wall_time: float
    cpu_time: float
    converged_at_iteration: int
    success: bool
    bounds: SearchBounds
    seed: int


# ---------------------------------------------------------------------------
# Swarm operations
# ---------------------------------------------------------------------------


def init_swarm(
    bounds: SearchBounds,
    cfg: PsoConfig,
    objective: SwarmObjective,
    rngs: Optional[list[np.random.Generator]] = None,
) -> Swarm:
    """Random swarm inside the search boxes.

    Positions are uniform in each box; velocities are uniform in
    ``[-(upper - lower), upper - lower]`` per dimension. Particle ``i`` draws from
    its own stream, so the result depends only on ``cfg.seed``.
    """
    if rngs is None:
        rngs = particle_rngs(cfg.seed, cfg.pop_max)
    lower = bounds.flat_lower.astype(float)
    upper = bounds.flat_upper.astype(float)
    span = upper - lower
    positions = np.empty((cfg.pop_max, lower.size))
    velocities = np.empty_like(positions)
    for index, rng in enumerate(rngs):
        positions[index] = lower + rng.random(lower.size) * span
        velocities[index] = (2.0 * rng.random(lower.size) - 1.0) * span
    costs = objective(positions)
    return Swarm(
        positions=positions,
        velocities=velocities,
        costs=costs.copy(),
        pbest_positions=positions.copy(),
        pbest_costs=costs.copy(),
        gbest_index=int(np.argmin(costs)),
        lower=lower,
        upper=upper,
        rngs=rngs,
    )


def pso_step(
    swarm: Swarm,
    cfg: PsoConfig,
    objective: SwarmObjective,
    inertia: Optional[float] = None,
) -> Swarm:
    """One synchronous swarm update, in place.

    Velocity: ``w v + c1 g1 (pbest - x) + c2 g2 (gbest - x)`` with fresh uniform
    ``g1, g2`` per particle and dimension. Positions leaving a box are clamped to it
    and the offending velocity component is zeroed. A particle's best is replaced
    when the new cost is less than or equal to it; the global best is the first
    particle with the lowest personal best.

    Args:
        swarm: Swarm to update.
        cfg: Coefficients.
        objective: Batch cost function.
        inertia: Inertia weight for this step; defaults to ``cfg.inertia_w``.

    Returns:
        The same swarm object.
    """
    w = cfg.inertia_w if inertia is None else inertia
    dims = swarm.positions.shape[1]
    gammas = np.stack([rng.random(2 * dims) for rng in swarm.rngs])
    g1 = gammas[:, :dims]
    g2 = gammas[:, dims:]

    gbest = swarm.gbest_position.copy()
    velocities = (
        w * swarm.velocities
        + cfg.c1 * g1 * (swarm.pbest_positions - swarm.positions)
        + cfg.c2 * g2 * (gbest - swarm.positions)
    )
    positions = swarm.positions + velocities

    below = positions < swarm.lower
    above = positions > swarm.upper
    positions = np.clip(positions, swarm.lower, swarm.upper)
    velocities[below | above] = 0.0

    costs = objective(positions)
    improved = costs <= swarm.pbest_costs
    swarm.pbest_positions[improved] = positions[improved]
    swarm.pbest_costs[improved] = costs[improved]

    swarm.positions = positions
    swarm.velocities = velocities
    swarm.costs = costs
    swarm.gbest_index = int(np.argmin(swarm.pbest_costs))
    return swarm


def convergence_iteration(history, rel_tol: float) -> int:
    """First index whose best cost is within ``rel_tol`` of the final best cost."""
    values = np.asarray(history, dtype=float)
    if values.size == 0:
        raise ValueError("history must not be empty")
    threshold = (1.0 + rel_tol) * values[-1]
    return int(np.flatnonzero(values <= threshold)[0])


def _cpu_seconds(process: psutil.Process) -> float:
    times = process.cpu_times()
    return times.user + times.system


def plan(
    ws: Workspace,
    spline_cfg: SplineConfig,
    cost_cfg: CostConfig,
    pso_cfg: PsoConfig,
) -> PlanResult:
    """Optimize spline control points for the workspace.

    Runs ``iter_max`` swarm updates with inertia ``w * damping**k`` at update ``k``.

    Args:
        ws: Workspace to plan in.
        spline_cfg: Spline degree, samples and path duration.
        cost_cfg: Penalty coefficient and actuator limits.
        pso_cfg: Swarm parameters and seed.

    Returns:
        Best path with its cost breakdown, per-iteration histories and timings.

    Raises:
        SearchBoundsError: If start and target coincide.
        SplineError: If the sample count is too small for the control points.
    """
    from swarmpath.planning import SplineError

    count = pso_cfg.n_control_points + 2
    if spline_cfg.sample_count_N < 2 * count:
        raise SplineError(
            f"sample_count_N={spline_cfg.sample_count_N} is below 2 x {count} control points"
        )

    process = psutil.Process()
    cpu_start = _cpu_seconds(process)
    wall_start = time.perf_counter()

    bounds = control_bounds(ws, pso_cfg.n_control_points, pso_cfg.lateral_margin)
    objective = SwarmObjective(ws, spline_cfg, cost_cfg, bounds)
    swarm = init_swarm(bounds, pso_cfg, objective)
    logger.debug(
        "Swarm initialised: %d particles, %d dims, best cost %.4f",
        swarm.size,
        swarm.positions.shape[1],
        swarm.gbest_cost,
    )

    best_history = np.empty(pso_cfg.iter_max)
    mean_history = np.empty(pso_cfg.iter_max)
    for iteration in range(pso_cfg.iter_max):
        pso_step(swarm, pso_cfg, objective, inertia=pso_cfg.inertia_at(iteration))
        best_history[iteration] = swarm.gbest_cost
        mean_history[iteration] = float(swarm.costs.mean())
        if (iteration + 1) % LOG_EVERY == 0:
            logger.debug(
                "Iteration %d/%d: best %.4f, mean %.4f",
                iteration + 1,
                pso_cfg.iter_max,
                best_history[iteration],
                mean_history[iteration],
            )

    polygon = ControlPolygon.from_flat(swarm.gbest_position, ws.start, ws.target)
    path = sample_path(polygon, spline_cfg)
    breakdown = path_cost(path, ws, cost_cfg)
    converged = convergence_iteration(best_history, pso_cfg.convergence_rel_tol)

    wall_time = time.perf_counter() - wall_start
    cpu_time = _cpu_seconds(process) - cpu_start
    logger.info(
        "Plan finished (seed=%d): length %.3f m, cost %.4f, collision-free=%s, "
        "converged at %d, %.2fs",
        pso_cfg.seed,
        breakdown.length,
        breakdown.total,
        breakdown.collision_free,
        converged,
        wall_time,
    )
    return PlanResult(
        best_polygon=polygon,
        best_path=path,
        best_cost=breakdown,
        best_cost_history=best_history,
        mean_cost_history=mean_history,
        wall_time=wall_time,
        cpu_time=cpu_time,
        converged_at_iteration=converged,
        success=breakdown.collision_free,
        bounds=bounds,
        seed=pso_cfg.seed,
    )
