"""Closed-loop tracking simulation: planned path, cascade controller and plant.

The plant state is augmented with the pose, ``[v, omega, omega_L, omega_R, x, y,
theta]``. The pose moves with the body velocity of the wheel speeds; the first
four components follow the wheel-level plant exactly as ``integrate_dynamics``
does, so logged voltages replay to the logged wheel speeds.

The controller runs at multiples of ``control_dt``; its voltages and reference are
held over the physics steps in between.
"""

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from swarmpath.control.tracking import (
    SAMPLE_TOLERANCE,
    ControllerConfig,
    Direction,
    TrackingController,
    pwm_duty,
)
from swarmpath.planning.spline import SampledPath, path_length_of
from swarmpath.planning.workspace import Workspace
from swarmpath.robot.integrator import rk4_step
from swarmpath.robot.model import DynState, Pose, RobotParams, plant_rhs
from swarmpath.sim.approach import approach_trajectory

logger = logging.getLogger(__name__)


class SimConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    dt: float = Field(0.005, gt=0, description="Physics step [s]")
    settle_time: float = Field(5.0, ge=0, description="Simulated time after the path ends [s]")
    approach_speed: float = Field(0.2, gt=0, description="Speed limit of the approach path [m/s]")
    join_tolerance: float = Field(0.02, gt=0)
    max_approach_time: float = Field(20.0, gt=0)
    start_offset: Optional[tuple[float, float]] = Field(
        None, description="Robot start relative to the path start [m]"
    )


class DutySample(NamedTuple):
    t: float
    duty_L: int
    dir_L: Direction
    duty_R: int
    dir_R: Direction


@dataclass(frozen=True, eq=False)
class SimResult:
    """Traces of one run; row ``k`` holds the state at ``times[k]`` and the control applied next."""

    times: np.ndarray  # (n,)
    reference: np.ndarray  # (n, 4): x_ref, y_ref, theta_ref, v_ref
    poses: np.ndarray  # (n, 3): x, y, theta
    wheel_speeds: np.ndarray  # (n, 2): omega_L, omega_R
    voltages: np.ndarray  # (n, 2): U_L, U_R
    duty: list[DutySample]
    tracking_error: np.ndarray  # (n,)
    final_pose: Pose
    final_state: DynState
    final_position_error: float
    collided: bool
    distance_traveled: float
    reference_path: SampledPath
    initial_state: DynState
    load_force: float

    def __len__(self) -> int:
        return len(self.times)

    @property
    def planned_length(self) -> float:
        return self.reference_path.length

    @property
    def trajectory(self) -> np.ndarray:
        """Every position including the final one, shape (n + 1, 2)."""
        return np.vstack([self.poses[:, :2], [self.final_pose.x, self.final_pose.y]])


def _augmented_rhs(params: RobotParams):
    r = params.wheel_radius_r
    d = params.wheel_base_D

    def rhs(x: np.ndarray, u: np.ndarray) -> np.ndarray:
        out = np.empty(7)
        out[:4] = plant_rhs(x[:4], u, params)
        v = r * (x[2] + x[3]) / 2.0
        out[4] = v * math.cos(x[6])
        out[5] = v * math.sin(x[6])
        out[6] = r * (x[3] - x[2]) / d
        return out

    return rhs


def points_in_obstacles(points: np.ndarray, ws: Workspace) -> np.ndarray:
    """Mask of points strictly inside any obstacle disc."""
    if not ws.obstacles:
        return np.zeros(len(points), dtype=bool)
    offsets = points[:, None, :] - ws.obstacle_centers
    distances = np.hypot(offsets[..., 0], offsets[..., 1])
    return (distances < ws.obstacle_radii).any(axis=1)


def _duty_log(
    times: np.ndarray, voltages: np.ndarray, control_dt: float, u_max: float
) -> list[DutySample]:
    samples = []
    dt = float(times[1] - times[0]) if len(times) > 1 else control_dt
    t = 0.0
    while t <= times[-1] + 1e-9:
        k = min(int(round(t / dt)), len(times) - 1)
        duty_L, dir_L = pwm_duty(float(voltages[k, 0]), u_max)
        duty_R, dir_R = pwm_duty(float(voltages[k, 1]), u_max)
        samples.append(DutySample(float(times[k]), duty_L, dir_L, duty_R, dir_R))
        t += control_dt
    return samples


def closed_loop_sim(
    ws: Workspace,
    planned_path: SampledPath,
    controller_cfg: ControllerConfig,
    robot_params: RobotParams,
    sim_cfg: SimConfig,
) -> SimResult:
    """Track a planned path with the cascade controller.

    The robot starts at rest on the path start (or at ``start_offset`` from it,
    joining through an approach path) facing the first heading reference. The run
    lasts the path duration plus ``settle_time``. The cascade is sampled every
    ``control_dt`` and its voltages are held between samples.

    Args:
        ws: Workspace for the collision check.
        planned_path: Path to track.
        controller_cfg: Cascade gains and sample time.
        robot_params: Plant parameters.
        sim_cfg: Physics step, settle time and approach settings.

    Returns:
        Traces and summary metrics of the run.

    Raises:
        SimulationDivergedError: If the state becomes non-finite.
        ApproachError: If the offset start cannot join the path.
    """
    from swarmpath.sim import SimulationDivergedError

    path = planned_path
    start_x, start_y = (float(c) for c in planned_path.points[0])
    if sim_cfg.start_offset is not None and any(sim_cfg.start_offset):
        start_x += sim_cfg.start_offset[0]
        start_y += sim_cfg.start_offset[1]
        path = approach_trajectory(
            Pose(start_x, start_y, 0.0),
            planned_path,
            speed=sim_cfg.approach_speed,
            join_tolerance=sim_cfg.join_tolerance,
            max_time=sim_cfg.max_approach_time,
        )

    if path.length == 0.0:
        logger.warning("Tracking a zero-length path; the robot should hold its start pose")
    controller = TrackingController(path, controller_cfg, robot_params)
    dt = sim_cfg.dt
    steps = int(round((path.duration + sim_cfg.settle_time) / dt))
    load = robot_params.wheel_load_force
    rhs = _augmented_rhs(robot_params)

    state = np.array([0.0, 0.0, 0.0, 0.0, start_x, start_y, controller.initial_heading])
    initial = DynState.from_array(state[:4])
    times = np.arange(steps) * dt
    reference = np.empty((steps, 4))
    poses = np.empty((steps, 3))
    wheel_speeds = np.empty((steps, 2))
    voltages = np.empty((steps, 2))

    control_dt = controller_cfg.control_dt
    next_sample = 0
    for k in range(steps):
        t = k * dt
        if t >= next_sample * control_dt - SAMPLE_TOLERANCE:
            step = controller.step(t, state[2], state[3], state[6], control_dt)
            next_sample = math.floor(t / control_dt + SAMPLE_TOLERANCE) + 1
        reference[k] = step.reference
        poses[k] = state[4:]
        wheel_speeds[k] = state[2:4]
        voltages[k] = (step.U_L, step.U_R)
        state = rk4_step(rhs, state, np.array([load, load, step.U_L, step.U_R]), dt)
        if not np.isfinite(state).all():
            raise SimulationDivergedError(f"state became non-finite at t={t + dt:.3f}s")

    final_pose = Pose(float(state[4]), float(state[5]), float(state[6]))
    final_state = DynState.from_array(state[:4])
    tracking_error = np.hypot(poses[:, 0] - reference[:, 0], poses[:, 1] - reference[:, 1])
    end_x, end_y = path.points[-1]
    trajectory = np.vstack([poses[:, :2], [final_pose.x, final_pose.y]])
    collided = bool(points_in_obstacles(trajectory, ws).any())
    result = SimResult(
        times=times,
        reference=reference,
        poses=poses,
        wheel_speeds=wheel_speeds,
        voltages=voltages,
        duty=_duty_log(times, voltages, controller_cfg.control_dt, robot_params.voltage_max_U),
        tracking_error=tracking_error,
        final_pose=final_pose,
        final_state=final_state,
        final_position_error=math.hypot(final_pose.x - end_x, final_pose.y - end_y),
        collided=collided,
        distance_traveled=float(path_length_of(trajectory)),
        reference_path=path,
        initial_state=initial,
        load_force=load,
    )
    logger.info(
        "Tracking finished: %d steps, final error %.4f m, traveled %.3f m of %.3f m, collided=%s",
        steps,
        result.final_position_error,
        result.distance_traveled,
        path.length,
        collided,
    )
    return result
