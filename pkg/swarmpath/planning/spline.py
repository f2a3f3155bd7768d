"""Clamped uniform B-spline paths.

A path is the B-spline through ``[start, interior points..., target]`` with clamped
knots (so it interpolates both endpoints), sampled uniformly in the curve
parameter and mapped onto physical time ``[0, T]``.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from swarmpath.planning.workspace import Point, Workspace

logger = logging.getLogger(__name__)


class SplineConfig(BaseModel):
    """Spline degree, sample count and path duration."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    smoothness_K: int = Field(3, ge=1, description="Spline degree")
    sample_count_N: int = Field(200, ge=2, description="Samples along the path")
    path_time_T: float = Field(50.0, gt=0, description="Path duration [s]")


@dataclass(frozen=True, eq=False)
class ControlPolygon:
    """Spline control points: fixed endpoints plus ``n`` free interior points."""

    interior_points: np.ndarray  # (n, 2)
    start: Point
    target: Point

    @property
    def n(self) -> int:
        return len(self.interior_points)

    def all_points(self) -> np.ndarray:
        """Control points including the endpoints, shape (n + 2, 2)."""
        return np.vstack([self.start, self.interior_points, self.target]).astype(float)

    @classmethod
    def from_flat(cls, flat: np.ndarray, start: Point, target: Point) -> "ControlPolygon":
        """Build from an interleaved ``[x1, y1, x2, y2, ...]`` vector."""
        return cls(np.asarray(flat, dtype=float).reshape(-1, 2).copy(), start, target)


@dataclass(frozen=True, eq=False)
class SampledPath:
    """Path samples on a uniform time grid with finite-difference derivatives."""

    times: np.ndarray  # (N,)
    points: np.ndarray  # (N, 2)
    first_derivatives: np.ndarray  # (N, 2)
    second_derivatives: np.ndarray  # (N, 2)
    length: float

    def __len__(self) -> int:
        return len(self.times)

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    @property
    def step(self) -> float:
        return float(self.times[1] - self.times[0])

    @classmethod
    def from_points(cls, times: np.ndarray, points: np.ndarray) -> "SampledPath":
        """Sampled path from uniformly timed points; derivatives by finite differences."""
        times = np.asarray(times, dtype=float)
        points = np.asarray(points, dtype=float)
        h = float(times[1] - times[0])
        first, second = finite_differences(points, h)
        return cls(times, points, first, second, path_length_of(points))


@dataclass(frozen=True, eq=False)
class SearchBounds:
    """Per-control-point search boxes; rows follow the interior point order."""

    lower: np.ndarray  # (n, 2)
    upper: np.ndarray  # (n, 2)
    start: Point
    target: Point

    @property
    def n(self) -> int:
        return len(self.lower)

    @property
    def flat_lower(self) -> np.ndarray:
        return self.lower.reshape(-1)

    @property
    def flat_upper(self) -> np.ndarray:
        return self.upper.reshape(-1)


# ---------------------------------------------------------------------------
# Basis functions
# ---------------------------------------------------------------------------


def effective_degree(count: int, degree: int) -> int:
    """Degree actually used for ``count`` control points (at most count - 1)."""
    return min(degree, count - 1)


def clamped_knots(count: int, degree: int) -> np.ndarray:
    """Clamped uniform knot vector for ``count`` control points."""
    inner = count - degree - 1
    interior = np.arange(1, inner + 1) / (inner + 1)
    return np.concatenate([np.zeros(degree + 1), interior, np.ones(degree + 1)])


def basis_matrix(t: np.ndarray, count: int, degree: int) -> np.ndarray:
    """B-spline basis values by the Cox-de Boor recursion.

    Args:
        t: Curve parameters in [0, 1].
        count: Number of control points.
        degree: Requested degree; capped at ``count - 1``.

    Returns:
        Array of shape (len(t), count); row i holds every basis function at t[i].
    """
    degree = effective_degree(count, degree)
    knots = clamped_knots(count, degree)
    t = np.atleast_1d(np.asarray(t, dtype=float))

    basis = np.zeros((t.size, knots.size - 1))
    for i in range(knots.size - 1):
        basis[:, i] = (knots[i] <= t) & (t < knots[i + 1])
    # closed right end
    basis[t >= 1.0, :] = 0.0
    basis[t >= 1.0, count - 1] = 1.0

    for d in range(1, degree + 1):
        nxt = np.zeros((t.size, knots.size - 1 - d))
        for i in range(knots.size - 1 - d):
            left_span = knots[i + d] - knots[i]
            right_span = knots[i + d + 1] - knots[i + 1]
            if left_span > 0:
                nxt[:, i] += (t - knots[i]) / left_span * basis[:, i]
            if right_span > 0:
                nxt[:, i] += (knots[i + d + 1] - t) / right_span * basis[:, i + 1]
        basis = nxt
    return basis


@lru_cache(maxsize=64)
def uniform_basis(sample_count: int, count: int, degree: int) -> np.ndarray:
    """Read-only basis matrix for ``sample_count`` uniform parameters in [0, 1]."""
    matrix = basis_matrix(np.linspace(0.0, 1.0, sample_count), count, degree)
    matrix.setflags(write=False)
    return matrix


# ---------------------------------------------------------------------------
# Curve evaluation and sampling
# ---------------------------------------------------------------------------


def evaluate_spline(polygon: ControlPolygon, cfg: SplineConfig, t: float) -> Point:
    """Curve point at normalized parameter ``t``.

    Raises:
        SplineError: If t is outside [0, 1].
    """
    from swarmpath.planning import SplineError

    if not 0.0 <= t <= 1.0:
        raise SplineError(f"spline parameter must lie in [0, 1], got {t}")
    points = polygon.all_points()
    row = basis_matrix(np.array([t]), len(points), cfg.smoothness_K)[0]
    x, y = row @ points
    return float(x), float(y)


def finite_differences(points: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """First and second time derivatives along the sample axis (axis -2).

    Central differences inside, second-order one-sided at both ends.
    """
    first = np.gradient(points, h, axis=-2, edge_order=2)
    second = np.empty_like(points)
    second[..., 1:-1, :] = (points[..., 2:, :] - 2.0 * points[..., 1:-1, :] + points[..., :-2, :])
    if points.shape[-2] >= 4:
        second[..., 0, :] = (
            2.0 * points[..., 0, :]
            - 5.0 * points[..., 1, :]
            + 4.0 * points[..., 2, :]
            - points[..., 3, :]
        )
        second[..., -1, :] = (
            2.0 * points[..., -1, :]
            - 5.0 * points[..., -2, :]
            + 4.0 * points[..., -3, :]
            - points[..., -4, :]
        )
    else:
        second[..., 0, :] = second[..., 1, :]
        second[..., -1, :] = second[..., -2, :]
    return first, second / (h * h)


def path_length_of(points: np.ndarray) -> float | np.ndarray:
    """Polyline length along axis -2."""
    steps = np.diff(points, axis=-2)
    return np.hypot(steps[..., 0], steps[..., 1]).sum(axis=-1)


def sample_points(control_points: np.ndarray, cfg: SplineConfig) -> np.ndarray:
    """Sample curves for control points of shape (..., m, 2); returns (..., N, 2)."""
    count = control_points.shape[-2]
    basis = uniform_basis(cfg.sample_count_N, count, cfg.smoothness_K)
    return np.einsum("nm,...mk->...nk", basis, control_points)


def sample_times(cfg: SplineConfig) -> np.ndarray:
    return np.linspace(0.0, cfg.path_time_T, cfg.sample_count_N)


def sample_path(polygon: ControlPolygon, cfg: SplineConfig) -> SampledPath:
    """Sample the spline at N uniform parameters mapped onto [0, T].

    Raises:
        SplineError: If N is below twice the number of control points.
    """
    from swarmpath.planning import SplineError

    count = polygon.n + 2
    if cfg.sample_count_N < 2 * count:
        raise SplineError(
            f"sample_count_N={cfg.sample_count_N} is below 2 x {count} control points"
        )
    times = sample_times(cfg)
    points = sample_points(polygon.all_points(), cfg)
    first, second = finite_differences(points, float(times[1] - times[0]))
    return SampledPath(times, points, first, second, float(path_length_of(points)))


def path_length(path: SampledPath) -> float:
    """Polyline length of the sampled path."""
    if len(path.points) < 2:
        raise ValueError("path_length needs at least two points")
    return float(path_length_of(path.points))


# ---------------------------------------------------------------------------
# Search regions
# ---------------------------------------------------------------------------


def control_bounds(
    workspace: Workspace, n: int, lateral_margin: float | None = None
) -> SearchBounds:
    """Search box of every interior control point.

    Nominal points are ``n + 2`` equally spaced points on the start-target segment.
    Box ``i`` spans nominal points ``i - 1`` to ``i``, widened by ``lateral_margin``
    on both sides perpendicular to the segment, replaced by its axis-aligned hull
    and clipped to the workspace.

    Args:
        workspace: Workspace supplying start, target and bounds.
        n: Number of interior control points.
        lateral_margin: Perpendicular widening [m]; defaults to the workspace extent.

    Raises:
        SearchBoundsError: If n < 1 or start equals target.
    """
    from swarmpath.planning import SearchBoundsError

    if n < 1:
        raise SearchBoundsError(f"need at least one control point, got n={n}")
    start = np.asarray(workspace.start, dtype=float)
    target = np.asarray(workspace.target, dtype=float)
    axis = target - start
    distance = math.hypot(*axis)
    if distance == 0.0:
        raise SearchBoundsError("start and target coincide")
    margin = workspace.extent if lateral_margin is None else lateral_margin
    normal = np.array([-axis[1], axis[0]]) / distance

    fractions = np.arange(n + 2) / (n + 1)
    nominal = start + fractions[:, None] * axis
    lows = []
    highs = []
    for i in range(1, n + 1):
        corners = np.array(
            [
                nominal[i - 1] + margin * normal,
                nominal[i - 1] - margin * normal,
                nominal[i] + margin * normal,
                nominal[i] - margin * normal,
            ]
        )
        lows.append(corners.min(axis=0))
        highs.append(corners.max(axis=0))
    box_min = np.array([workspace.x_min, workspace.y_min])
    box_max = np.array([workspace.x_max, workspace.y_max])
    lower = np.clip(np.array(lows), box_min, box_max)
    upper = np.clip(np.array(highs), box_min, box_max)
    return SearchBounds(lower, upper, workspace.start, workspace.target)


def random_control_polygon(bounds: SearchBounds, rng: np.random.Generator) -> ControlPolygon:
    """Control points drawn uniformly inside their boxes."""
    draws = rng.random(bounds.lower.shape)
    interior = bounds.lower + draws * (bounds.upper - bounds.lower)
    return ControlPolygon(interior, bounds.start, bounds.target)
