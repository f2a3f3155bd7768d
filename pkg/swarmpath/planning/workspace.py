"""Rectangular workspaces with circular obstacles.

Workspaces are loaded from JSON documents::

    {
      "schema_version": 1,
      "name": "B",
      "bounds": {"x_min": 0, "x_max": 4, "y_min": 0, "y_max": 4},
      "start": [0.3, 0.3],
      "target": [3.7, 3.7],
      "obstacles": [{"center": [2.0, 2.0], "radius": 0.45}]
    }

or generated at random for Monte Carlo campaigns.
"""

import json
import logging
import math
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from swarmpath.rng import STREAM_WORKSPACE, make_rng

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
MAX_SAMPLING_ATTEMPTS = 10_000
SHIPPED_WORKSPACES = ("A", "B", "C")

Point = tuple[float, float]


class Obstacle(BaseModel):
    """Circular obstacle."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    center_x: float
    center_y: float
    radius: float = Field(gt=0)


class Workspace(BaseModel):
    """Operating field: bounds, obstacles, start and target."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    x_min: float = 0.0
    x_max: float = 4.0
    y_min: float = 0.0
    y_max: float = 4.0
    obstacles: tuple[Obstacle, ...] = ()
    start: Point
    target: Point
    name: Optional[str] = None

    @model_validator(mode="after")
    def _check_invariants(self) -> "Workspace":
        if not self.x_min < self.x_max:
            raise ValueError(f"x_min ({self.x_min}) must be below x_max ({self.x_max})")
        if not self.y_min < self.y_max:
            raise ValueError(f"y_min ({self.y_min}) must be below y_max ({self.y_max})")
        for label, point in (("start", self.start), ("target", self.target)):
            if not self.contains(*point):
                raise ValueError(f"{label} {point} outside workspace bounds")
            for index, obstacle in enumerate(self.obstacles):
                if distance_to_obstacle(point[0], point[1], obstacle) <= obstacle.radius:
                    raise ValueError(f"{label} inside obstacle {index}")
        return self

    def contains(self, x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    @property
    def extent(self) -> float:
        """Largest side of the bounding rectangle."""
        return max(self.x_max - self.x_min, self.y_max - self.y_min)

    @property
    def straight_distance(self) -> float:
        return math.dist(self.start, self.target)

    @property
    def obstacle_centers(self) -> np.ndarray:
        """Obstacle centers as a read-only (k, 2) array."""
        return _obstacle_arrays(self.obstacles)[0]

    @property
    def obstacle_radii(self) -> np.ndarray:
        """Obstacle radii as a read-only (k,) array."""
        return _obstacle_arrays(self.obstacles)[1]

    def with_uniform_radius(self, radius: float) -> "Workspace":
        """Copy with every obstacle radius replaced (re-validated)."""
        obstacles = [{**o.model_dump(), "radius": radius} for o in self.obstacles]
        return Workspace.model_validate({**self.model_dump(), "obstacles": obstacles})


class RandomWorkspaceConfig(BaseModel):
    """Sampling ranges for random workspaces (uniform distributions)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    obstacle_count_range: tuple[int, int] = (5, 10)
    radius_range: tuple[float, float] = (0.1, 0.5)
    center_range_x: tuple[float, float] = (0.5, 3.5)
    center_range_y: tuple[float, float] = (0.5, 3.5)
    start_range_x: tuple[float, float] = (0.0, 0.5)
    start_range_y: tuple[float, float] = (0.0, 0.5)
    target_range_x: tuple[float, float] = (3.5, 4.0)
    target_range_y: tuple[float, float] = (3.5, 4.0)
    bounds: tuple[float, float, float, float] = (0.0, 4.0, 0.0, 4.0)
    fixed_radius: Optional[float] = Field(None, gt=0)
    seed: int = Field(0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def _check_ranges(self) -> "RandomWorkspaceConfig":
        ranges = {
            "obstacle_count_range": self.obstacle_count_range,
            "radius_range": self.radius_range,
            "center_range_x": self.center_range_x,
            "center_range_y": self.center_range_y,
            "start_range_x": self.start_range_x,
            "start_range_y": self.start_range_y,
            "target_range_x": self.target_range_x,
            "target_range_y": self.target_range_y,
        }
        for name, (low, high) in ranges.items():
            if low > high:
                raise ValueError(f"{name} is empty: {low} > {high}")
        if self.obstacle_count_range[0] < 1:
            raise ValueError("obstacle_count_range must start at 1 or more")
        if self.radius_range[0] <= 0:
            raise ValueError("radius_range must be strictly positive")
        x_min, x_max, y_min, y_max = self.bounds
        if not (x_min < x_max and y_min < y_max):
            raise ValueError(f"bounds {self.bounds} are empty")
        return self


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------


@lru_cache(maxsize=256)
def _obstacle_arrays(obstacles: tuple[Obstacle, ...]) -> tuple[np.ndarray, np.ndarray]:
    centers = np.array([[o.center_x, o.center_y] for o in obstacles], dtype=float)
    centers = centers.reshape(len(obstacles), 2)
    radii = np.array([o.radius for o in obstacles], dtype=float)
    centers.setflags(write=False)
    radii.setflags(write=False)
    return centers, radii


def distance_to_obstacle(x: float, y: float, obs: Obstacle) -> float:
    """Euclidean distance from a point to an obstacle center."""
    return math.hypot(x - obs.center_x, y - obs.center_y)


# ---------------------------------------------------------------------------
# Documents
# ---------------------------------------------------------------------------


class _Bounds(BaseModel):
    model_config = ConfigDict(extra="forbid")

    x_min: float
    x_max: float
    y_min: float
    y_max: float


class _ObstacleEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    center: Point
    radius: float


class WorkspaceDocument(BaseModel):
    """On-disk workspace layout."""

    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = SCHEMA_VERSION
    name: Optional[str] = None
    description: Optional[str] = None
    bounds: _Bounds = _Bounds(x_min=0.0, x_max=4.0, y_min=0.0, y_max=4.0)
    start: Point
    target: Point
    obstacles: list[_ObstacleEntry] = []

    def to_workspace(self) -> Workspace:
        return Workspace(
            x_min=self.bounds.x_min,
            x_max=self.bounds.x_max,
            y_min=self.bounds.y_min,
            y_max=self.bounds.y_max,
            obstacles=tuple(
                Obstacle(center_x=o.center[0], center_y=o.center[1], radius=o.radius)
                for o in self.obstacles
            ),
            start=self.start,
            target=self.target,
            name=self.name,
        )

    @classmethod
    def from_workspace(
        cls, ws: Workspace, description: Optional[str] = None
    ) -> "WorkspaceDocument":
        return cls(
            name=ws.name,
            description=description,
            bounds=_Bounds(x_min=ws.x_min, x_max=ws.x_max, y_min=ws.y_min, y_max=ws.y_max),
            start=ws.start,
            target=ws.target,
            obstacles=[
                _ObstacleEntry(center=(o.center_x, o.center_y), radius=o.radius)
                for o in ws.obstacles
            ],
        )


def _describe(exc: ValidationError) -> str:
    messages = []
    for error in exc.errors():
        location = ".".join(str(part) for part in error["loc"])
        message = error["msg"].removeprefix("Value error, ")
        messages.append(f"{location}: {message}" if location else message)
    return "; ".join(messages)


def workspace_from_dict(data: dict) -> Workspace:
    """Validate a parsed workspace document.

    Raises:
        WorkspaceError: If the document or the resulting workspace is invalid.
    """
    from swarmpath.planning import WorkspaceError

    try:
        return WorkspaceDocument.model_validate(data).to_workspace()
    except ValidationError as exc:
        raise WorkspaceError(f"invalid workspace: {_describe(exc)}") from exc


def load_workspace(document: str) -> Workspace:
    """Parse and validate a JSON workspace document.

    Args:
        document: JSON text.

    Returns:
        Validated workspace.

    Raises:
        WorkspaceError: On parse errors or invariant violations; the message names
            the violated invariant (e.g. ``start inside obstacle 3``).
    """
    from swarmpath.planning import WorkspaceError

    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise WorkspaceError(f"workspace document is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise WorkspaceError("workspace document must be a JSON object")
    return workspace_from_dict(data)


def dump_workspace(ws: Workspace, description: Optional[str] = None) -> str:
    """Serialize a workspace to its JSON document (inverse of load_workspace)."""
    document = WorkspaceDocument.from_workspace(ws, description)
    return json.dumps(document.model_dump(mode="json", exclude_none=True), indent=2) + "\n"


def load_workspace_file(path: str | Path) -> Workspace:
    """Load a workspace document from disk."""
    from swarmpath.planning import WorkspaceError

    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise WorkspaceError(f"cannot read workspace file {path}: {exc}") from exc
    logger.debug("Loading workspace from %s", path)
    return load_workspace(text)


def shipped_workspace(name: str) -> Workspace:
    """One of the bundled workspace reconstructions ("A", "B" or "C")."""
    from swarmpath.planning import WorkspaceError

    key = name.upper()
    if key not in SHIPPED_WORKSPACES:
        raise WorkspaceError(
            f"unknown shipped workspace {name!r}; choose from {SHIPPED_WORKSPACES}"
        )
    text = (
        resources.files("swarmpath.data")
        .joinpath("workspaces", f"workspace_{key.lower()}.json")
        .read_text(encoding="utf-8")
    )
    return load_workspace(text)


# ---------------------------------------------------------------------------
# Random generation
# ---------------------------------------------------------------------------


def _uniform(rng: np.random.Generator, bounds: tuple[float, float]) -> float:
    low, high = bounds
    return float(low + rng.random() * (high - low))


def _clear_of(obstacles: list[Obstacle], x: float, y: float) -> bool:
    return all(distance_to_obstacle(x, y, o) > o.radius for o in obstacles)


def random_workspace(cfg: RandomWorkspaceConfig) -> Workspace:
    """Sample a workspace from uniform distributions.

    Deterministic for a fixed ``cfg.seed``. Obstacles may overlap. Start and target
    are resampled until they clear every obstacle.

    Raises:
        WorkspaceSamplingError: If no valid start/target is found within
            ``MAX_SAMPLING_ATTEMPTS`` draws.
    """
    from swarmpath.planning import WorkspaceSamplingError

    rng = make_rng(cfg.seed, STREAM_WORKSPACE)
    low, high = cfg.obstacle_count_range
    count = int(rng.integers(low, high, endpoint=True))
    obstacles = []
    for _ in range(count):
        center_x = _uniform(rng, cfg.center_range_x)
        center_y = _uniform(rng, cfg.center_range_y)
        radius = _uniform(rng, cfg.radius_range)
        if cfg.fixed_radius is not None:
            radius = cfg.fixed_radius
        obstacles.append(Obstacle(center_x=center_x, center_y=center_y, radius=radius))

    endpoints: dict[str, Point] = {}
    attempts = 0
    for label, x_range, y_range in (
        ("start", cfg.start_range_x, cfg.start_range_y),
        ("target", cfg.target_range_x, cfg.target_range_y),
    ):
        while True:
            attempts += 1
            if attempts > MAX_SAMPLING_ATTEMPTS:
                raise WorkspaceSamplingError(
                    f"no obstacle-free {label} after {MAX_SAMPLING_ATTEMPTS} attempts "
                    f"(seed={cfg.seed})"
                )
            x = _uniform(rng, x_range)
            y = _uniform(rng, y_range)
            if _clear_of(obstacles, x, y) and endpoints.get("start") != (x, y):
                endpoints[label] = (x, y)
                break

    x_min, x_max, y_min, y_max = cfg.bounds
    ws = Workspace(
        x_min=x_min,
        x_max=x_max,
        y_min=y_min,
        y_max=y_max,
        obstacles=tuple(obstacles),
        start=endpoints["start"],
        target=endpoints["target"],
        name=f"random-{cfg.seed}",
    )
    logger.debug(
        "Random workspace seed=%d: %d obstacles, %d endpoint draws", cfg.seed, count, attempts
    )
    return ws
