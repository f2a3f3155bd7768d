"""Monte Carlo planning campaigns and penalty-coefficient sweeps.

Run ``i`` of a campaign uses seed ``base_seed XOR i`` for both the random
workspace (``random`` mode) and the swarm. In ``fixed`` mode every run plans on
the same workspace and only the swarm seed changes. Every report field except
the timing ones is a pure function of the configs and seeds.
"""

import logging
import statistics
from concurrent.futures import ProcessPoolExecutor
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from swarmpath.planning.cost import CostConfig
from swarmpath.planning.pso import PsoConfig, plan
from swarmpath.planning.spline import SplineConfig
from swarmpath.planning.workspace import RandomWorkspaceConfig, Workspace, random_workspace
from swarmpath.rng import run_seed

logger = logging.getLogger(__name__)

TIMING_FIELDS = frozenset({"cpu_time", "wall_time", "avg_cpu_time", "avg_convergence_time"})


class MonteCarloConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    runs: int = Field(40, ge=1)
    base_seed: int = Field(0, ge=0, lt=2**64)
    mode: Literal["random", "fixed"] = "random"
    jobs: int = Field(1, ge=1, description="Worker processes")


class RunRecord(BaseModel):
    """Outcome of one planning run."""

    index: int
    seed: int
    workspace_name: Optional[str] = None
    success: bool
    path_length: float
    straight_distance: float
    best_cost: float
    collision: float
    velocity: float
    acceleration: float
    converged_at_iteration: int
    cpu_time: float
    wall_time: float


class McReport(BaseModel):
    runs: int
    success_rate: float
    avg_length: Optional[float] = None
    shortest_length: Optional[float] = None
    length_sd: Optional[float] = None
    avg_cpu_time: float
    avg_convergence_iteration: float
    avg_convergence_time: float
    records: list[RunRecord]

    def deterministic_dump(self) -> dict:
        """Report without wall-clock fields."""
        data = self.model_dump(mode="json", exclude=set(TIMING_FIELDS))
        data["records"] = [
            record.model_dump(mode="json", exclude=set(TIMING_FIELDS)) for record in self.records
        ]
        return data


class SweepEntry(BaseModel):
    beta: float
    report: McReport


class ReportComparison(BaseModel):
    """Differences ``second - first`` between two campaigns on identical seeds."""

    success_rate_delta: float
    avg_length_delta: Optional[float] = None
    length_sd_delta: Optional[float] = None
    cpu_time_ratio: Optional[float] = None


# ---------------------------------------------------------------------------
# Runs
# ---------------------------------------------------------------------------


def _plan_once(
    index: int,
    seed: int,
    ws: Workspace,
    spline_cfg: SplineConfig,
    cost_cfg: CostConfig,
    pso_cfg: PsoConfig,
) -> RunRecord:
    result = plan(ws, spline_cfg, cost_cfg, pso_cfg.model_copy(update={"seed": seed}))
    cost = result.best_cost
    return RunRecord(
        index=index,
        seed=seed,
        workspace_name=ws.name,
        success=result.success,
        path_length=cost.length,
        straight_distance=ws.straight_distance,
        best_cost=cost.total,
        collision=cost.collision,
        velocity=cost.velocity,
        acceleration=cost.acceleration,
        converged_at_iteration=result.converged_at_iteration,
        cpu_time=result.cpu_time,
        wall_time=result.wall_time,
    )


def _run(
    index: int,
    mc_cfg: MonteCarloConfig,
    spline_cfg: SplineConfig,
    cost_cfg: CostConfig,
    pso_cfg: PsoConfig,
    random_cfg: RandomWorkspaceConfig,
    workspace: Optional[Workspace],
) -> RunRecord:
    seed = run_seed(mc_cfg.base_seed, index)
    if mc_cfg.mode == "random":
        ws = random_workspace(random_cfg.model_copy(update={"seed": seed}))
    else:
        ws = workspace
    record = _plan_once(index, seed, ws, spline_cfg, cost_cfg, pso_cfg)
    logger.debug(
        "Run %d (seed=%d): success=%s length=%.3f",
        index,
        seed,
        record.success,
        record.path_length,
    )
    return record


def aggregate(records: list[RunRecord], iter_max: int) -> McReport:
    """Reduce per-run records (in any order) to campaign metrics.

    Length statistics cover successful runs only and are ``None`` without any.
    The standard deviation is the population one. Convergence time is the mean
    CPU time scaled by the mean convergence iteration over ``iter_max``.
    """
    if not records:
        raise ValueError("cannot aggregate an empty campaign")
    records = sorted(records, key=lambda record: record.index)
    lengths = [record.path_length for record in records if record.success]
    avg_cpu = statistics.fmean(record.cpu_time for record in records)
    avg_iteration = statistics.fmean(record.converged_at_iteration for record in records)
    return McReport(
        runs=len(records),
        success_rate=len(lengths) / len(records),
        avg_length=statistics.fmean(lengths) if lengths else None,
        shortest_length=min(lengths) if lengths else None,
        length_sd=statistics.pstdev(lengths) if lengths else None,
        avg_cpu_time=avg_cpu,
        avg_convergence_iteration=avg_iteration,
        avg_convergence_time=avg_cpu * avg_iteration / iter_max,
        records=records,
    )


def monte_carlo(
    mc_cfg: MonteCarloConfig,
    spline_cfg: SplineConfig,
    cost_cfg: CostConfig,
    pso_cfg: PsoConfig,
    random_cfg: Optional[RandomWorkspaceConfig] = None,
    workspace: Optional[Workspace] = None,
) -> McReport:
    """Run a planning campaign and aggregate it.

    Args:
        mc_cfg: Run count, base seed, mode and worker count.
        spline_cfg: Spline settings shared by every run.
        cost_cfg: Cost settings shared by every run.
        pso_cfg: Swarm settings; the seed is replaced per run.
        random_cfg: Workspace generator for ``random`` mode; its seed is replaced per run.
        workspace: Workspace for ``fixed`` mode.

    Returns:
        Aggregated report with per-run records sorted by run index.

    Raises:
        ValueError: If ``fixed`` mode has no workspace.
    """
    if mc_cfg.mode == "fixed" and workspace is None:
        raise ValueError("fixed mode needs a workspace")
    random_cfg = random_cfg or RandomWorkspaceConfig()
    indices = range(mc_cfg.runs)
    logger.info(
        "Monte Carlo: %d runs, mode=%s, base_seed=%d, jobs=%d",
        mc_cfg.runs,
        mc_cfg.mode,
        mc_cfg.base_seed,
        mc_cfg.jobs,
    )
    args = (mc_cfg, spline_cfg, cost_cfg, pso_cfg, random_cfg, workspace)
    if mc_cfg.jobs > 1 and mc_cfg.runs > 1:
        with ProcessPoolExecutor(max_workers=mc_cfg.jobs) as pool:
            futures = [pool.submit(_run, index, *args) for index in indices]
            records = [future.result() for future in futures]
    else:
        records = [_run(index, *args) for index in indices]

    report = aggregate(records, pso_cfg.iter_max)
    logger.info(
        "Monte Carlo finished: SR=%.3f, avg length=%s, SD=%s",
        report.success_rate,
        report.avg_length,
        report.length_sd,
    )
    return report


def beta_sweep(
    betas: list[float],
    mc_cfg: MonteCarloConfig,
    spline_cfg: SplineConfig,
    cost_cfg: CostConfig,
    pso_cfg: PsoConfig,
    random_cfg: Optional[RandomWorkspaceConfig] = None,
    workspace: Optional[Workspace] = None,
) -> list[SweepEntry]:
    """One campaign per penalty coefficient, all on the same seeds.

    Raises:
        ValueError: If ``betas`` is empty or contains a negative value.
    """
    if not betas:
        raise ValueError("betas must not be empty")
    if any(beta < 0 for beta in betas):
        raise ValueError(f"betas must be non-negative, got {betas}")
    entries = []
    for beta in betas:
        logger.info("Sweep: beta_p=%g", beta)
        report = monte_carlo(
            mc_cfg,
            spline_cfg,
            cost_cfg.model_copy(update={"beta_p": float(beta)}),
            pso_cfg,
            random_cfg,
            workspace,
        )
        entries.append(SweepEntry(beta=float(beta), report=report))
    return entries


def compare_configs(first: McReport, second: McReport) -> ReportComparison:
    """How ``second`` differs from ``first``."""

    def delta(a: Optional[float], b: Optional[float]) -> Optional[float]:
        return None if a is None or b is None else b - a

    ratio = second.avg_cpu_time / first.avg_cpu_time if first.avg_cpu_time > 0 else None
    return ReportComparison(
        success_rate_delta=second.success_rate - first.success_rate,
        avg_length_delta=delta(first.avg_length, second.avg_length),
        length_sd_delta=delta(first.length_sd, second.length_sd),
        cpu_time_ratio=ratio,
    )
