"""Robot model: physical parameters, kinematics and the wheel-level plant."""

from swarmpath.robot.integrator import integrate_dynamics, rk4_step
from swarmpath.robot.model import (
    BodyVelocity,
    ControlVector,
    DynState,
    Pose,
    RobotParams,
    body_to_wheels,
    lateral_force,
    pose_step,
    state_derivative,
    wheel_traction,
    wheels_to_body,
)

__all__ = [
    "BodyVelocity",
    "ControlVector",
    "DynState",
    "Pose",
    "RobotParams",
    "body_to_wheels",
    "integrate_dynamics",
    "lateral_force",
    "pose_step",
    "rk4_step",
    "state_derivative",
    "wheel_traction",
    "wheels_to_body",
    "RobotModelError",
    "NonFiniteInputError",
]


class RobotModelError(Exception):
    """Base exception for robot model operations."""

    pass


class NonFiniteInputError(RobotModelError):
    """A control input or state contains NaN or infinity."""

    pass
