"""CSV and JSON writers for planning, tracking and campaign results.

Column orders are fixed; see ``docs/formats.md``. JSON is written with sorted
keys so reruns with the same seeds produce identical non-timing content.
"""

import csv
import json
import logging
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from swarmpath import __version__
from swarmpath.planning.pso import PlanResult
from swarmpath.planning.spline import SampledPath, path_length_of
from swarmpath.sim.closed_loop import SimResult
from swarmpath.sim.montecarlo import McReport, SweepEntry

logger = logging.getLogger(__name__)

PATH_COLUMNS = ("t", "x", "y", "xd", "yd", "xdd", "ydd")
HISTORY_COLUMNS = ("iteration", "best_cost", "mean_cost")
TRACE_COLUMNS = (
    "t",
    "x_ref",
    "y_ref",
    "theta_ref",
    "v_ref",
    "x",
    "y",
    "theta",
    "omega_L",
    "omega_R",
    "U_L",
    "U_R",
    "tracking_error",
)
DUTY_COLUMNS = ("t", "duty_L", "dir_L", "duty_R", "dir_R")
RUN_COLUMNS = (
    "index",
    "seed",
    "workspace",
    "success",
    "path_length",
    "straight_distance",
    "best_cost",
    "collision",
    "velocity",
    "acceleration",
    "converged_at_iteration",
    "cpu_time",
    "wall_time",
)
SWEEP_COLUMNS = (
    "beta",
    "runs",
    "success_rate",
    "avg_length",
    "shortest_length",
    "length_sd",
    "avg_cpu_time",
    "avg_convergence_time",
)


class RunManifest(BaseModel):
    """What a command ran with and what it wrote."""

    command: str
    config: dict[str, Any]
    arguments: dict[str, Any] = Field(default_factory=dict)
    seeds: dict[str, int] = Field(default_factory=dict)
    version: str = __version__
    started_at: str
    finished_at: Optional[str] = None
    outputs: list[str] = Field(default_factory=list)


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


# ---------------------------------------------------------------------------
# Writers
# ---------------------------------------------------------------------------


def _write_rows(path: Path, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(columns)
        count = 0
        for row in rows:
            writer.writerow(row)
            count += 1
    logger.info("Wrote %s (%d rows)", path, count)
    return path


def _cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, (np.floating, float)):
        return repr(float(value))
    return value


def dumps_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def write_json(path: Path, data: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_json(data), encoding="utf-8")
    logger.info("Wrote %s", path)
    return path


def write_path_csv(path: Path, sampled: SampledPath) -> Path:
    rows = (
        [_cell(t), _cell(p[0]), _cell(p[1]), _cell(d[0]), _cell(d[1]), _cell(a[0]), _cell(a[1])]
        for t, p, d, a in zip(
            sampled.times, sampled.points, sampled.first_derivatives, sampled.second_derivatives
        )
    )
    return _write_rows(path, PATH_COLUMNS, rows)


def write_history_csv(path: Path, result: PlanResult) -> Path:
    rows = (
        [index, _cell(best), _cell(mean)]
        for index, (best, mean) in enumerate(
            zip(result.best_cost_history, result.mean_cost_history)
        )
    )
    return _write_rows(path, HISTORY_COLUMNS, rows)


def write_trace_csv(path: Path, sim: SimResult) -> Path:
    table = np.column_stack(
        [sim.times, sim.reference, sim.poses, sim.wheel_speeds, sim.voltages, sim.tracking_error]
    )
    return _write_rows(path, TRACE_COLUMNS, ([_cell(v) for v in row] for row in table))


def write_duty_csv(path: Path, sim: SimResult) -> Path:
    rows = ([_cell(s.t), s.duty_L, s.dir_L, s.duty_R, s.dir_R] for s in sim.duty)
    return _write_rows(path, DUTY_COLUMNS, rows)


def write_runs_csv(path: Path, report: McReport) -> Path:
    rows = (
        [
            r.index,
            r.seed,
            r.workspace_name or "",
            int(r.success),
            _cell(r.path_length),
            _cell(r.straight_distance),
            _cell(r.best_cost),
            _cell(r.collision),
            _cell(r.velocity),
            _cell(r.acceleration),
            r.converged_at_iteration,
            _cell(r.cpu_time),
            _cell(r.wall_time),
        ]
        for r in report.records
    )
    return _write_rows(path, RUN_COLUMNS, rows)


def write_sweep_csv(path: Path, entries: list[SweepEntry]) -> Path:
    rows = (
        [
            _cell(e.beta),
            e.report.runs,
            _cell(e.report.success_rate),
            _cell(e.report.avg_length),
            _cell(e.report.shortest_length),
            _cell(e.report.length_sd),
            _cell(e.report.avg_cpu_time),
            _cell(e.report.avg_convergence_time),
        ]
        for e in entries
    )
    return _write_rows(path, SWEEP_COLUMNS, rows)


def plan_summary(result: PlanResult) -> dict[str, Any]:
    """JSON-ready view of a planning result."""
    cost = result.best_cost
    return {
        "seed": result.seed,
        "success": result.success,
        "path_length": cost.length,
        "cost": {
            "length": cost.length,
            "collision": cost.collision,
            "velocity": cost.velocity,
            "acceleration": cost.acceleration,
            "total": cost.total,
        },
        "converged_at_iteration": result.converged_at_iteration,
        "iterations": len(result.best_cost_history),
        "control_points": result.best_polygon.all_points().tolist(),
        "search_bounds": {
            "lower": result.bounds.lower.tolist(),
            "upper": result.bounds.upper.tolist(),
        },
        "samples": len(result.best_path),
        "cpu_time": result.cpu_time,
        "wall_time": result.wall_time,
    }


def sim_summary(sim: SimResult) -> dict[str, Any]:
    return {
        "steps": len(sim),
        "final_pose": {"x": sim.final_pose.x, "y": sim.final_pose.y, "theta": sim.final_pose.theta},
        "final_position_error": sim.final_position_error,
        "max_tracking_error": float(sim.tracking_error.max()) if len(sim) else 0.0,
        "distance_traveled": sim.distance_traveled,
        "planned_length": sim.planned_length,
        "collided": sim.collided,
    }


def sweep_summary(entries: list[SweepEntry], include_timing: bool = True) -> list[dict[str, Any]]:
    return [
        {
            "beta": e.beta,
            "report": (
                e.report.model_dump(mode="json")
                if include_timing
                else e.report.deterministic_dump()
            ),
        }
        for e in entries
    ]


def write_manifest(directory: Path, manifest: RunManifest) -> Path:
    """Write ``manifest.json`` atomically into ``directory``."""
    directory.mkdir(parents=True, exist_ok=True)
    target = directory / "manifest.json"
    fd, tmp = tempfile.mkstemp(prefix=".manifest-", suffix=".json", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(dumps_json(manifest.model_dump(mode="json")))
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    logger.info("Wrote manifest %s", target)
    return target


# ---------------------------------------------------------------------------
# Readers
# ---------------------------------------------------------------------------


def load_path_csv(path: str | Path) -> SampledPath:
    """Read a path CSV written by ``write_path_csv``.

    Raises:
        PathFileError: If the file is missing, has other columns or fewer than four samples.
    """
    from swarmpath.report import PathFileError

    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header is None or tuple(header) != PATH_COLUMNS:
                raise PathFileError(f"{path}: expected columns {','.join(PATH_COLUMNS)}")
            rows = [[float(cell) for cell in row] for row in reader if row]
    except OSError as exc:
        raise PathFileError(f"cannot read path file {path}: {exc}") from exc
    except ValueError as exc:
        raise PathFileError(f"{path}: non-numeric value ({exc})") from exc

    if len(rows) < 4:
        raise PathFileError(f"{path}: need at least 4 samples, got {len(rows)}")
    table = np.array(rows)
    if not np.isfinite(table).all():
        raise PathFileError(f"{path}: contains non-finite values")
    times = table[:, 0]
    steps = np.diff(times)
    if (steps <= 0).any() or not np.allclose(steps, steps[0], rtol=1e-6, atol=1e-9):
        raise PathFileError(f"{path}: times must be uniform and increasing")
    points = table[:, 1:3]
    return SampledPath(
        times=times,
        points=points,
        first_derivatives=table[:, 3:5],
        second_derivatives=table[:, 5:7],
        length=float(path_length_of(points)),
    )
