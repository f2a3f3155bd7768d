"""Simulation harness: closed-loop tracking, approach paths and Monte Carlo campaigns."""

__all__ = [
    "SimulationError",
    "SimulationDivergedError",
    "ApproachError",
]


class SimulationError(Exception):
    """Base exception for simulation operations."""

    pass


class SimulationDivergedError(SimulationError):
    """The simulated state became NaN or infinite."""

    pass


class ApproachError(SimulationError):
    """The approach path did not reach the planned path in time."""

    pass
