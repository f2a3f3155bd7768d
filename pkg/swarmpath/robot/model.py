"""Differential-drive robot model.

Kinematic conversions between wheel and body velocities, unicycle pose
integration, cornering-force diagnostics and the linear wheel-level plant

    x = [v, omega, omega_L, omega_R],   u = [F_L, F_R, U_L, U_R],   x_dot = A x + B u

Sign convention: omega = (v_R - v_L) / D, and a positive F_R - F_L spins the body
counter-clockwise.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from swarmpath.robot.integrator import rk4_step

logger = logging.getLogger(__name__)

# Largest RK4 substep used by pose_step
POSE_SUBSTEP = 0.01


class RobotParams(BaseModel):
    """Physical constants of the robot."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mass_m: float = Field(0.9, gt=0, description="Robot mass [kg]")
    inertia_J: float = Field(0.001, gt=0, description="Wheel inertia [kg m^2]")
    friction_F: float = Field(0.01, gt=0, description="Viscous coefficient on wheel speed")
    wheel_radius_r: float = Field(0.021, gt=0, description="Wheel radius [m]")
    wheel_base_D: float = Field(0.145, gt=0, description="Distance between wheels [m]")
    voltage_max_U: float = Field(12.0, gt=0, description="Motor voltage limit [V]")
    wheel_load_force: float = Field(0.01, ge=0, description="Constant tangent force per wheel [N]")

    @property
    def no_load_speed(self) -> float:
        """Steady wheel speed at full voltage with no load [rad/s]."""
        return self.voltage_max_U / self.friction_F


@dataclass(frozen=True, slots=True)
class Pose:
    x: float
    y: float
    theta: float  # unwrapped


@dataclass(frozen=True, slots=True)
class BodyVelocity:
    v: float
    omega: float


@dataclass(frozen=True, slots=True)
class DynState:
    """Plant state, or its time derivative (a, epsilon, epsilon_L, epsilon_R)."""

    v: float = 0.0
    omega: float = 0.0
    omega_L: float = 0.0
    omega_R: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.v, self.omega, self.omega_L, self.omega_R], dtype=float)

    @classmethod
    def from_array(cls, values: np.ndarray) -> "DynState":
        return cls(float(values[0]), float(values[1]), float(values[2]), float(values[3]))


@dataclass(frozen=True, slots=True)
class ControlVector:
    F_L: float = 0.0
    F_R: float = 0.0
    U_L: float = 0.0
    U_R: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.F_L, self.F_R, self.U_L, self.U_R], dtype=float)


class WheelVelocities(NamedTuple):
    v_L: float
    v_R: float
    omega_L: float
    omega_R: float


# ---------------------------------------------------------------------------
# Kinematics
# ---------------------------------------------------------------------------


def wheels_to_body(omega_L: float, omega_R: float, params: RobotParams) -> BodyVelocity:
    """Body velocity from wheel angular speeds."""
    v_L = params.wheel_radius_r * omega_L
    v_R = params.wheel_radius_r * omega_R
    return BodyVelocity(v=(v_R + v_L) / 2.0, omega=(v_R - v_L) / params.wheel_base_D)


def body_to_wheels(v: float, omega: float, params: RobotParams) -> WheelVelocities:
    """Wheel tangential and angular speeds for a body velocity (inverse of wheels_to_body)."""
    half_turn = omega * params.wheel_base_D / 2.0
    v_L = v - half_turn
    v_R = v + half_turn
    return WheelVelocities(
        v_L=v_L,
        v_R=v_R,
        omega_L=v_L / params.wheel_radius_r,
        omega_R=v_R / params.wheel_radius_r,
    )


def _unicycle(state: np.ndarray, vel: np.ndarray) -> np.ndarray:
    theta = state[2]
    return np.array([vel[0] * math.cos(theta), vel[0] * math.sin(theta), vel[1]])


def pose_step(pose: Pose, vel: BodyVelocity, dt: float) -> Pose:
    """Advance a pose by ``dt`` under constant body velocity.

    RK4 with substeps no longer than ``POSE_SUBSTEP``.

    Raises:
        ValueError: If dt is not positive.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    substeps = max(1, math.ceil(dt / POSE_SUBSTEP - 1e-12))
    h = dt / substeps
    state = np.array([pose.x, pose.y, pose.theta], dtype=float)
    velocity = np.array([vel.v, vel.omega], dtype=float)
    for _ in range(substeps):
        state = rk4_step(_unicycle, state, velocity, h)
    return Pose(float(state[0]), float(state[1]), float(state[2]))


# ---------------------------------------------------------------------------
# Cornering forces (diagnostics only)
# ---------------------------------------------------------------------------


def lateral_force(v: float, omega: float, params: RobotParams) -> float:
    """Lateral force per wheel while cornering, S = (m/2) v omega."""
    return params.mass_m / 2.0 * v * omega


def wheel_traction(F_i: float, S_i: float) -> float:
    """Total traction force from tangent and lateral components."""
    return math.hypot(F_i, S_i)


# ---------------------------------------------------------------------------
# Wheel-level plant
# ---------------------------------------------------------------------------


@lru_cache(maxsize=32)
def system_matrices(params: RobotParams) -> tuple[np.ndarray, np.ndarray]:
    """State-space matrices (A, B) of the plant, read-only."""
    m = params.mass_m
    j = params.inertia_J
    f = params.friction_F
    r = params.wheel_radius_r
    d = params.wheel_base_D
    a = np.zeros((4, 4))
    a[2, 2] = -f / j
    a[3, 3] = -f / j
    b = np.array(
        [
            [1.0 / m, 1.0 / m, 0.0, 0.0],
            [-d / (2.0 * j), d / (2.0 * j), 0.0, 0.0],
            [-r / j, 0.0, 1.0 / j, 0.0],
            [0.0, -r / j, 0.0, 1.0 / j],
        ]
    )
    a.setflags(write=False)
    b.setflags(write=False)
    logger.debug("Built plant matrices for %s", params)
    return a, b


def plant_rhs(x: np.ndarray, u: np.ndarray, params: RobotParams) -> np.ndarray:
    """Array form of state_derivative."""
    a, b = system_matrices(params)
    return a @ x + b @ u


def state_derivative(x: DynState, u: ControlVector, params: RobotParams) -> DynState:
    """Time derivative of the plant state under control ``u``."""
    return DynState.from_array(plant_rhs(x.as_array(), u.as_array(), params))
