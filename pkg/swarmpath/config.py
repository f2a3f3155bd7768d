"""Configuration management for swarmpath.

Two layers:

* ``Settings``: process settings from the environment / ``.env`` (log level,
  log file, default output directory, worker count).
* ``ExperimentConfig``: one TOML experiment file (or a run manifest) with a
  section per library module, validated by pydantic. Unknown keys are errors.
"""

import json
import logging
import tomllib
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from swarmpath.control.tracking import ControllerConfig
from swarmpath.planning.cost import CostConfig
from swarmpath.planning.pso import PsoConfig
from swarmpath.planning.spline import SplineConfig
from swarmpath.planning.workspace import (
    Point,
    RandomWorkspaceConfig,
    Workspace,
    load_workspace_file,
    random_workspace,
    shipped_workspace,
    workspace_from_dict,
)
from swarmpath.robot.model import RobotParams
from swarmpath.sim.closed_loop import SimConfig
from swarmpath.sim.montecarlo import MonteCarloConfig

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """Process settings."""

    log_level: str = "INFO"
    log_file: Optional[str] = None
    output_dir: str = "runs"
    jobs: int = Field(1, ge=1)

    model_config = SettingsConfigDict(
        env_prefix="SWARMPATH_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )


def get_settings() -> Settings:
    """Get process settings."""
    return Settings()


class ConfigError(Exception):
    """Experiment configuration cannot be read or is invalid."""

    pass


# ---------------------------------------------------------------------------
# Experiment config
# ---------------------------------------------------------------------------

# Values a preset puts under the file's own values
PRESETS: dict[str, dict[str, Any]] = {
    "default": {},
    "experimental": {
        "spline": {"path_time_T": 30.0},
        "controller": {"control_dt": 1.5},
        "random_workspace": {"fixed_radius": 0.05},
        "workspace": {"radius_override": 0.05},
        "cost": {"inflate_obstacles": True},
    },
}


class WorkspaceSection(BaseModel):
    """Where the workspace comes from: a shipped name, a file, or inline fields."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: Optional[str] = None
    file: Optional[str] = None
    bounds: Optional[dict[str, float]] = None
    start: Optional[Point] = None
    target: Optional[Point] = None
    obstacles: Optional[list[dict[str, Any]]] = None
    radius_override: Optional[float] = Field(None, gt=0)

    @property
    def inline(self) -> bool:
        return self.start is not None or self.target is not None or self.obstacles is not None

    @model_validator(mode="after")
    def _one_source(self) -> "WorkspaceSection":
        sources = [self.name is not None, self.file is not None, self.inline]
        if sum(sources) > 1:
            raise ValueError("workspace: give only one of name, file or inline fields")
        if self.inline and (self.start is None or self.target is None):
            raise ValueError("workspace: inline workspaces need start and target")
        return self


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    preset: Literal["default", "experimental"] = "default"
    workspace: WorkspaceSection = WorkspaceSection()
    random_workspace: RandomWorkspaceConfig = RandomWorkspaceConfig()
    spline: SplineConfig = SplineConfig()
    cost: CostConfig = CostConfig()
    pso: PsoConfig = PsoConfig()
    controller: ControllerConfig = ControllerConfig()
    robot: RobotParams = RobotParams()
    sim: SimConfig = SimConfig()
    montecarlo: MonteCarloConfig = MonteCarloConfig()


def _merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _describe(exc: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(p) for p in error['loc'])}: {error['msg'].removeprefix('Value error, ')}"
        for error in exc.errors()
    )


def config_from_mapping(data: dict[str, Any]) -> ExperimentConfig:
    """Validate a parsed config mapping after laying it over its preset.

    Raises:
        ConfigError: If the preset is unknown or any section is invalid.
    """
    preset = data.get("preset", "default")
    if preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    try:
        return ExperimentConfig.model_validate(_merge(PRESETS[preset], data))
    except ValidationError as exc:
        raise ConfigError(f"invalid config: {_describe(exc)}") from exc


def load_experiment_config(path: Optional[str | Path] = None) -> ExperimentConfig:
    """Read a TOML experiment file or a run manifest (``.json``).

    Relative workspace file paths are resolved against the config file's directory.

    Args:
        path: Config file; ``None`` gives the default configuration.

    Raises:
        ConfigError: If the file cannot be read, parsed or validated.
    """
    if path is None:
        return config_from_mapping({})
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc

    if path.suffix.lower() == ".json":
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
        if isinstance(data, dict) and isinstance(data.get("config"), dict):
            data = data["config"]
    else:
        try:
            data = tomllib.loads(raw.decode("utf-8"))
        except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
            raise ConfigError(f"{path}: invalid TOML: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a table/object")

    workspace = data.get("workspace")
    if isinstance(workspace, dict) and isinstance(workspace.get("file"), str):
        file = Path(workspace["file"])
        if not file.is_absolute():
            data = _merge(data, {"workspace": {"file": str((path.parent / file).resolve())}})

    logger.debug("Loaded config from %s (preset=%s)", path, data.get("preset", "default"))
    return config_from_mapping(data)


def apply_overrides(
    cfg: ExperimentConfig,
    seed: Optional[int] = None,
    runs: Optional[int] = None,
    jobs: Optional[int] = None,
    control_dt: Optional[float] = None,
) -> ExperimentConfig:
    """Copy of ``cfg`` with command-line values applied and re-validated.

    ``seed`` sets the swarm seed, the random workspace seed and the Monte Carlo
    base seed together.

    Raises:
        ConfigError: If an override is out of range.
    """
    data = cfg.model_dump()
    if seed is not None:
        data["pso"]["seed"] = seed
        data["random_workspace"]["seed"] = seed
        data["montecarlo"]["base_seed"] = seed
    if runs is not None:
        data["montecarlo"]["runs"] = runs
    if jobs is not None:
        data["montecarlo"]["jobs"] = jobs
    if control_dt is not None:
        data["controller"]["control_dt"] = control_dt
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid override: {_describe(exc)}") from exc


def resolve_workspace(cfg: ExperimentConfig) -> Optional[Workspace]:
    """Workspace named by the ``[workspace]`` section, or ``None`` when it names none.

    Raises:
        WorkspaceError: If the workspace cannot be loaded or fails validation.
    """
    from swarmpath.planning import WorkspaceError

    section = cfg.workspace
    if section.name is not None:
        ws = shipped_workspace(section.name)
    elif section.file is not None:
        ws = load_workspace_file(section.file)
    elif section.inline:
        document: dict[str, Any] = {"start": section.start, "target": section.target}
        if section.bounds is not None:
            document["bounds"] = section.bounds
        if section.obstacles is not None:
            document["obstacles"] = section.obstacles
        ws = workspace_from_dict(document)
    else:
        return None

    if section.radius_override is not None:
        try:
            ws = ws.with_uniform_radius(section.radius_override)
        except ValidationError as exc:
            raise WorkspaceError(
                f"radius override {section.radius_override} invalidates workspace: {exc}"
            ) from exc
    return ws


def planning_workspace(cfg: ExperimentConfig) -> Workspace:
    """The configured workspace, or a random one from ``[random_workspace]``."""
    ws = resolve_workspace(cfg)
    if ws is None:
        ws = random_workspace(cfg.random_workspace)
    return ws
