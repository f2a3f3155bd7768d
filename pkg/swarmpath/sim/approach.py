"""Approach path from an offset robot position onto a planned path.

The robot chases a moving aim point: at step ``s`` it heads for path sample ``s``
and covers at most ``speed * step`` along the line of sight. Because the aim
point keeps sliding forward, the approach blends into the path tangentially
instead of meeting its start head-on.
"""

import logging
import math

import numpy as np

from swarmpath.planning.spline import SampledPath
from swarmpath.robot.model import Pose

logger = logging.getLogger(__name__)


def pursuit_prefix(
    start: tuple[float, float],
    path: SampledPath,
    speed: float,
    join_tolerance: float,
    max_time: float,
) -> tuple[np.ndarray, list[int], int]:
    """Simulate the pursuit of the moving aim point.

    Returns:
        ``(prefix, aim_indices, join_index)``: positions visited before joining,
        shape (m, 2); the aim index used at each of those steps; and the path
        sample where the pursuit joined.

    Raises:
        ApproachError: If the pursuit does not join within ``max_time``.
    """
    from swarmpath.sim import ApproachError

    if speed <= 0:
        raise ValueError(f"speed must be positive, got {speed}")
    step_time = path.step
    max_steps = math.ceil(max_time / step_time)
    last = len(path) - 1

    position = np.asarray(start, dtype=float)
    prefix: list[np.ndarray] = []
    aims: list[int] = []
    for step in range(max_steps + 1):
        aim = min(step, last)
        offset = path.points[aim] - position
        distance = math.hypot(offset[0], offset[1])
        if distance <= join_tolerance:
            return np.array(prefix).reshape(-1, 2), aims, aim
        prefix.append(position.copy())
        aims.append(aim)
        position = position + offset * (min(speed * step_time, distance) / distance)

    raise ApproachError(
        f"approach from {tuple(float(c) for c in start)} did not join the path "
        f"within {max_time:g}s"
    )


def approach_trajectory(
    robot_pose: Pose,
    path: SampledPath,
    speed: float = 0.2,
    join_tolerance: float = 0.02,
    max_time: float = 20.0,
) -> SampledPath:
    """Path that starts at the robot and joins ``path`` by pursuit.

    Args:
        robot_pose: Current robot pose; only the position is used.
        path: Planned path.
        speed: Approach speed limit [m/s].
        join_tolerance: Distance at which the approach counts as joined [m].
        max_time: Pursuit time budget [s].

    Returns:
        The pursuit positions followed by the rest of the path from the join
        sample, on a uniform time grid with the planned path's step. The input
        path is returned unchanged when the robot is already on its start.

    Raises:
        ValueError: If the pose is not finite.
        ApproachError: If the pursuit does not join in time.
    """
    if not all(math.isfinite(c) for c in (robot_pose.x, robot_pose.y, robot_pose.theta)):
        raise ValueError(f"robot pose must be finite, got {robot_pose}")
    prefix, _, join = pursuit_prefix(
        (robot_pose.x, robot_pose.y), path, speed, join_tolerance, max_time
    )
    if len(prefix) == 0:
        return path
    points = np.vstack([prefix, path.points[join:]])
    times = np.arange(len(points)) * path.step
    logger.info(
        "Approach joined path at sample %d after %d steps (%.2fs)",
        join,
        len(prefix),
        len(prefix) * path.step,
    )
    return SampledPath.from_points(times, points)
