"""Cascaded trajectory tracking controller.

Outer loop: PID1 on the speed error and PID2 on the heading error give the body
commands ``(v_in, theta_in)``; ``omega_in`` is the backward difference of
``theta_in``. The body commands are mapped to wheel speed references, and the
inner loop (PID3 left, PID4 right) turns wheel speed errors into motor voltages.

The cascade runs once per control period (``control_dt``). The path reference
advances one sample per period and is held in between, as are the voltages.

Two cascades are available. ``"literal"`` uses the loops as drawn: ``v_in =
PID1(e_v)``, ``theta_in = PID2(e_theta)`` and ``U = PID(e_omega)``. The default
``"feedforward"`` cascade adds each reference to its loop output (the steady-state
voltage ``F omega_in + r F_load`` for the wheels) and weights the PID corrections,
with wheel speed errors normalized by the no-load speed.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Literal, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from swarmpath.control.pid import PidGains, PidState, pid_step
from swarmpath.planning.spline import SampledPath
from swarmpath.robot.model import BodyVelocity, RobotParams, body_to_wheels, wheels_to_body

logger = logging.getLogger(__name__)

# Below this speed [m/s] a path sample carries no heading
STATIONARY_SPEED = 1e-12

PWM_LEVELS = 255

# Slack [s] when matching a time to a sample instant
SAMPLE_TOLERANCE = 1e-9

Direction = Literal["forward", "reverse"]


class ControllerConfig(BaseModel):
    """Gains, sample time and output limits of the four loops.

    ``pid3_limits`` and ``pid4_limits`` are fractions of the voltage limit. The
    feedback scales only apply to the ``"feedforward"`` cascade.
    """

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    pid1: PidGains = PidGains(kp=5.0, ki=5.0, kd=2.0)
    pid2: PidGains = PidGains(kp=5.0, ki=5.0, kd=2.0)
    pid3: PidGains = PidGains(kp=0.5, ki=5.0, kd=2.0)
    pid4: PidGains = PidGains(kp=0.01, ki=1.0, kd=0.1)
    control_dt: float = Field(2.5, gt=0, description="Reference sample time [s]")
    pid1_limits: tuple[float, float] = (-2.0, 2.0)
    pid2_limits: tuple[float, float] = (-math.pi, math.pi)
    pid3_limits: tuple[float, float] = (-1.0, 1.0)
    pid4_limits: tuple[float, float] = (-1.0, 1.0)
    derivative_filter_coefficient: float = Field(10.0, gt=0)
    cascade: Literal["feedforward", "literal"] = "feedforward"
    speed_feedback_scale: float = Field(0.0, ge=0, description="Weight of PID1 on v_in")
    heading_feedback_scale: float = Field(0.1, ge=0, description="Weight of PID2 on theta_in")
    wheel_feedback_scale: float = Field(0.0, ge=0, description="Weight of PID3/PID4 on U")
    signed_speed: bool = Field(False, description="Negative v_ref when the path runs towards -x")

    @model_validator(mode="after")
    def _check_limits(self) -> "ControllerConfig":
        for name in ("pid1_limits", "pid2_limits", "pid3_limits", "pid4_limits"):
            low, high = getattr(self, name)
            if not low < high:
                raise ValueError(f"{name} must be ordered (low < high), got ({low}, {high})")
        return self

    @property
    def filter_time(self) -> float:
        """Derivative filter time constant [s]."""
        return self.control_dt / self.derivative_filter_coefficient


@dataclass(frozen=True)
class ReferenceSignal:
    v_ref: float
    theta_ref: float  # unwrapped


class ReferenceSample(NamedTuple):
    x: float
    y: float
    theta: float
    v: float


@dataclass
class CascadeState:
    """Memory of the four controllers and the previous heading command."""

    pid1: PidState = field(default_factory=PidState)
    pid2: PidState = field(default_factory=PidState)
    pid3: PidState = field(default_factory=PidState)
    pid4: PidState = field(default_factory=PidState)
    previous_theta_in: Optional[float] = None

    def reset(self) -> None:
        for state in (self.pid1, self.pid2, self.pid3, self.pid4):
            state.reset()
        self.previous_theta_in = None


class ControlStep(NamedTuple):
    """Everything the cascade produced for one control step."""

    reference: ReferenceSample
    v_in: float
    omega_in: float
    omega_L_in: float
    omega_R_in: float
    U_L: float
    U_R: float


# ---------------------------------------------------------------------------
# Reference generation
# ---------------------------------------------------------------------------


def wrap_angle(angle: float) -> float:
    """Equivalent angle in [-pi, pi]."""
    return math.remainder(angle, 2.0 * math.pi)


def _unwrap_against(angle: float, previous: float) -> float:
    return angle + 2.0 * math.pi * round((previous - angle) / (2.0 * math.pi))


def _signal_from_rates(
    xd: float, yd: float, previous: Optional[ReferenceSignal], signed_speed: bool
) -> ReferenceSignal:
    speed = math.hypot(xd, yd)
    if speed <= STATIONARY_SPEED:
        return ReferenceSignal(0.0, previous.theta_ref if previous is not None else 0.0)
    theta = math.atan2(yd, xd)
    if previous is not None:
        theta = _unwrap_against(theta, previous.theta_ref)
    v = speed if (xd >= 0 or not signed_speed) else -speed
    return ReferenceSignal(v, theta)


def reference_signals(
    path: SampledPath,
    index: int,
    previous: Optional[ReferenceSignal] = None,
    signed_speed: bool = True,
) -> ReferenceSignal:
    """Speed and heading references at one path sample.

    The heading is the direction of the path tangent, unwrapped against
    ``previous``. With ``signed_speed`` the speed is negative when the path runs
    towards -x. A stationary sample keeps the previous heading.

    Raises:
        IndexError: If index is outside the path.
    """
    if not -len(path) <= index < len(path):
        raise IndexError(f"sample index {index} outside path of {len(path)} samples")
    xd, yd = path.first_derivatives[index]
    return _signal_from_rates(float(xd), float(yd), previous, signed_speed)


class ReferenceSchedule:
    """Path reference sampled every ``control_dt`` and held in between.

    Samples sit at ``k * control_dt`` plus one at the path end. After the end the
    schedule holds the final position and heading with zero speed.
    """

    def __init__(self, path: SampledPath, cfg: ControllerConfig) -> None:
        duration = path.duration
        times = np.arange(0.0, duration, cfg.control_dt)
        if times.size == 0 or duration - times[-1] > 1e-9:
            times = np.append(times, duration)
        path_times = path.times - path.times[0]
        xs = np.interp(times, path_times, path.points[:, 0])
        ys = np.interp(times, path_times, path.points[:, 1])
        xds = np.interp(times, path_times, path.first_derivatives[:, 0])
        yds = np.interp(times, path_times, path.first_derivatives[:, 1])

        signals: list[ReferenceSignal] = []
        previous: Optional[ReferenceSignal] = None
        for xd, yd in zip(xds, yds):
            previous = _signal_from_rates(float(xd), float(yd), previous, cfg.signed_speed)
            signals.append(previous)
        # a stationary start takes the first heading that exists
        moving = [s.theta_ref for s in signals if s.v_ref != 0.0]
        if moving and signals[0].v_ref == 0.0:
            first = moving[0]
            for index, signal in enumerate(signals):
                if signal.v_ref != 0.0:
                    break
                signals[index] = ReferenceSignal(0.0, first)

        self.times = times
        self.x = xs
        self.y = ys
        self.theta = np.array([s.theta_ref for s in signals])
        self.v = np.array([s.v_ref for s in signals])
        self.duration = duration
        logger.debug(
            "Reference schedule: %d samples over %.2fs (control_dt=%g)",
            len(times),
            duration,
            cfg.control_dt,
        )

    def __len__(self) -> int:
        return len(self.times)

    def sample(self, t: float) -> ReferenceSample:
        """Reference held at time ``t``: the latest sample at or before it."""
        if t >= self.times[-1] - SAMPLE_TOLERANCE or len(self.times) == 1:
            return ReferenceSample(
                float(self.x[-1]), float(self.y[-1]), float(self.theta[-1]), 0.0
            )
        k = max(int(np.searchsorted(self.times, t + SAMPLE_TOLERANCE, side="right")) - 1, 0)
        return ReferenceSample(
            float(self.x[k]), float(self.y[k]), float(self.theta[k]), float(self.v[k])
        )


# ---------------------------------------------------------------------------
# Loops
# ---------------------------------------------------------------------------


def outer_loop(
    ref: ReferenceSignal,
    feedback: BodyVelocity,
    theta: float,
    cfg: ControllerConfig,
    states: CascadeState,
    dt: Optional[float] = None,
) -> tuple[float, float]:
    """Body speed and yaw rate commands from the speed and heading errors.

    Args:
        ref: Speed and heading reference.
        feedback: Measured body velocity.
        theta: Measured heading (unwrapped).
        cfg: Controller configuration.
        states: Cascade memory, updated in place.
        dt: Execution step [s]; defaults to ``cfg.control_dt``.

    Returns:
        ``(v_in, omega_in)``.
    """
    dt = cfg.control_dt if dt is None else dt
    e_v = ref.v_ref - feedback.v
    e_theta = wrap_angle(ref.theta_ref - theta)

    v_pid = pid_step(cfg.pid1, states.pid1, e_v, dt, cfg.pid1_limits, cfg.filter_time)
    theta_pid = pid_step(cfg.pid2, states.pid2, e_theta, dt, cfg.pid2_limits, cfg.filter_time)
    if cfg.cascade == "literal":
        v_in = v_pid
        theta_in = theta_pid
    else:
        v_in = ref.v_ref + cfg.speed_feedback_scale * v_pid
        theta_in = ref.theta_ref + cfg.heading_feedback_scale * theta_pid

    if states.previous_theta_in is None:
        omega_in = 0.0
    else:
        omega_in = (theta_in - states.previous_theta_in) / dt
    states.previous_theta_in = theta_in
    return v_in, omega_in


def wheel_references(v_in: float, omega_in: float, params: RobotParams) -> tuple[float, float]:
    """Wheel angular speed references ``(omega_L_in, omega_R_in)``."""
    wheels = body_to_wheels(v_in, omega_in, params)
    return wheels.omega_L, wheels.omega_R


def inner_loop(
    omega_L_in: float,
    omega_R_in: float,
    omega_L_out: float,
    omega_R_out: float,
    cfg: ControllerConfig,
    states: CascadeState,
    params: RobotParams,
    dt: Optional[float] = None,
) -> tuple[float, float]:
    """Wheel voltages from the wheel speed errors.

    PID3 drives the left wheel and PID4 the right one. In the literal cascade the
    PID output is the voltage. Otherwise the error is normalized by the no-load
    speed, the output is scaled by the voltage limit and ``wheel_feedback_scale``,
    and the steady-state voltage ``F omega_in + r F_load`` is added. Both voltages
    are saturated to the motor limit.

    Returns:
        ``(U_L, U_R)`` in volts.
    """
    dt = cfg.control_dt if dt is None else dt
    u_max = params.voltage_max_U
    literal = cfg.cascade == "literal"
    nominal = 1.0 if literal else params.no_load_speed
    voltages = []
    for gains, state, limits, reference, measured in (
        (cfg.pid3, states.pid3, cfg.pid3_limits, omega_L_in, omega_L_out),
        (cfg.pid4, states.pid4, cfg.pid4_limits, omega_R_in, omega_R_out),
    ):
        if literal:
            limits = (limits[0] * u_max, limits[1] * u_max)
        correction = pid_step(
            gains, state, (reference - measured) / nominal, dt, limits, cfg.filter_time
        )
        if literal:
            voltage = correction
        else:
            voltage = (
                cfg.wheel_feedback_scale * u_max * correction
                + params.friction_F * reference
                + params.wheel_radius_r * params.wheel_load_force
            )
        voltages.append(min(max(voltage, -u_max), u_max))
    return voltages[0], voltages[1]


def pwm_duty(U: float, U_max: float) -> tuple[int, Direction]:
    """8-bit duty cycle and direction for a motor voltage (round half up).

    Raises:
        ValueError: If U_max is not positive.
    """
    if U_max <= 0:
        raise ValueError(f"U_max must be positive, got {U_max}")
    duty = math.floor(PWM_LEVELS * min(abs(U), U_max) / U_max + 0.5)
    return duty, ("forward" if U >= 0 else "reverse")


# ---------------------------------------------------------------------------
# Controller
# ---------------------------------------------------------------------------


class TrackingController:
    """The full cascade bound to one path; owned by a single simulation loop."""

    def __init__(self, path: SampledPath, cfg: ControllerConfig, params: RobotParams) -> None:
        self.cfg = cfg
        self.params = params
        self.schedule = ReferenceSchedule(path, cfg)
        self.state = CascadeState()

    @property
    def initial_heading(self) -> float:
        return float(self.schedule.theta[0])

    def reset(self) -> None:
        self.state.reset()

    def step(
        self, t: float, omega_L: float, omega_R: float, theta: float, dt: float
    ) -> ControlStep:
        """Run the cascade once for the measured wheel speeds and heading at ``t``.

        Called once per control period with ``dt = control_dt``; the caller holds
        the returned voltages until the next call.
        """
        reference = self.schedule.sample(t)
        body = wheels_to_body(omega_L, omega_R, self.params)
        v_in, omega_in = outer_loop(
            ReferenceSignal(reference.v, reference.theta),
            body,
            theta,
            self.cfg,
            self.state,
            dt,
        )
        omega_L_in, omega_R_in = wheel_references(v_in, omega_in, self.params)
        U_L, U_R = inner_loop(
            omega_L_in, omega_R_in, omega_L, omega_R, self.cfg, self.state, self.params, dt
        )
        return ControlStep(reference, v_in, omega_in, omega_L_in, omega_R_in, U_L, U_R)
