"""Fixed-step fourth-order Runge-Kutta integration of the wheel-level plant."""

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable

import numpy as np

if TYPE_CHECKING:
    from swarmpath.robot.model import ControlVector, DynState, RobotParams

logger = logging.getLogger(__name__)


def rk4_step(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray], x: np.ndarray, u: np.ndarray, h: float
) -> np.ndarray:
    """One RK4 step of ``x_dot = f(x, u)`` with ``u`` held over the step."""
    k1 = f(x, u)
    k2 = f(x + 0.5 * h * k1, u)
    k3 = f(x + 0.5 * h * k2, u)
    k4 = f(x + h * k3, u)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@dataclass(frozen=True)
class DynamicsTrace:
    """Plant states sampled every ``dt``; ``states[k]`` is the state at ``times[k]``."""

    times: np.ndarray
    states: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    def at(self, index: int) -> "DynState":
        from swarmpath.robot.model import DynState

        return DynState.from_array(self.states[index])


def integrate_dynamics(
    x0: "DynState",
    u_of_t: Callable[[float], "ControlVector"],
    dt: float,
    T: float,
    params: "RobotParams",
) -> DynamicsTrace:
    """Integrate the plant from ``x0`` over ``[0, T]``.

    ``u_of_t`` is evaluated once at the start of every step and held for the step.

    Args:
        x0: Initial plant state.
        u_of_t: Control signal as a function of time.
        dt: Step size [s].
        T: Horizon [s]; rounded to a whole number of steps.
        params: Robot parameters.

    Returns:
        Trace with ``round(T / dt) + 1`` samples.

    Raises:
        ValueError: If dt <= 0 or T < dt.
        NonFiniteInputError: If the control signal is not finite.
    """
    from swarmpath.robot import NonFiniteInputError
    from swarmpath.robot.model import plant_rhs

    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if T < dt:
        raise ValueError(f"T must be at least dt, got T={T}, dt={dt}")

    steps = int(round(T / dt))
    states = np.empty((steps + 1, 4))
    times = np.arange(steps + 1) * dt
    states[0] = x0.as_array()

    def rhs(x: np.ndarray, u: np.ndarray) -> np.ndarray:
        return plant_rhs(x, u, params)

    for k in range(steps):
        u = u_of_t(k * dt).as_array()
        if not np.all(np.isfinite(u)):
            raise NonFiniteInputError(f"non-finite control input at t={k * dt:.6g}: {u}")
        states[k + 1] = rk4_step(rhs, states[k], u, dt)

    logger.debug("Integrated %d plant steps (dt=%g, T=%g)", steps, dt, T)
    if not math.isfinite(float(states[-1].sum())):
        logger.warning("Plant state became non-finite during integration")
    return DynamicsTrace(times=times, states=states)
