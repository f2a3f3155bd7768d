"""Discrete PID controller.

Trapezoidal integral, first-order filtered derivative on the error and an output
clamp with conditional anti-windup: while the output is saturated the integral is
not advanced in the direction that deepens the saturation.
"""

import logging
from dataclasses import dataclass
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

logger = logging.getLogger(__name__)


class PidGains(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    kp: float = Field(0.0, ge=0)
    ki: float = Field(0.0, ge=0)
    kd: float = Field(0.0, ge=0)


@dataclass
class PidState:
    """Memory of one controller between calls."""

    integral: float = 0.0
    previous_error: Optional[float] = None
    derivative: float = 0.0
    saturated: bool = False

    def reset(self) -> None:
        self.integral = 0.0
        self.previous_error = None
        self.derivative = 0.0
        self.saturated = False


def pid_step(
    gains: PidGains,
    state: PidState,
    error: float,
    dt: float,
    limits: Optional[tuple[float, float]] = None,
    filter_time: float = 0.0,
) -> float:
    """Advance the controller by one sample and return its output.

    Args:
        gains: Proportional, integral and derivative gains.
        state: Controller memory, updated in place.
        error: Current error sample.
        dt: Time since the previous sample [s].
        limits: Optional ``(low, high)`` output clamp.
        filter_time: Derivative filter time constant [s]; 0 gives the raw difference.

    Returns:
        Controller output, clamped to ``limits`` when given.

    Raises:
        ValueError: If dt is not positive.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")

    previous = error if state.previous_error is None else state.previous_error
    integral = state.integral + 0.5 * (error + previous) * dt
    derivative = (filter_time * state.derivative + (error - previous)) / (filter_time + dt)

    output = gains.kp * error + gains.ki * integral + gains.kd * derivative
    saturated = False
    if limits is not None:
        low, high = limits
        if output > high:
            saturated = True
            # freeze unless the error unwinds the integral
            if error > 0:
                integral = state.integral
            output = high
        elif output < low:
            saturated = True
            if error < 0:
                integral = state.integral
            output = low

    state.integral = integral
    state.previous_error = error
    state.derivative = derivative
    state.saturated = saturated
    return output
