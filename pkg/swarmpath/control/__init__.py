"""Trajectory tracking: discrete PID controllers and the cascaded speed/heading/wheel loops."""

from swarmpath.control.pid import PidGains, PidState, pid_step
from swarmpath.control.tracking import (
    CascadeState,
    ControllerConfig,
    ControlStep,
    ReferenceSample,
    ReferenceSchedule,
    ReferenceSignal,
    TrackingController,
    inner_loop,
    outer_loop,
    pwm_duty,
    reference_signals,
    wheel_references,
    wrap_angle,
)

__all__ = [
    "CascadeState",
    "ControllerConfig",
    "ControlStep",
    "PidGains",
    "PidState",
    "ReferenceSample",
    "ReferenceSchedule",
    "ReferenceSignal",
    "TrackingController",
    "inner_loop",
    "outer_loop",
    "pid_step",
    "pwm_duty",
    "reference_signals",
    "wheel_references",
    "wrap_angle",
]
