"""CLI implementation for swarmpath using Typer + Rich.

Provides commands: plan, track, montecarlo, sweep, validate-config.

Exit codes: 0 success, 1 configuration, input or unexpected error, 2 no collision-free
path found, 3 simulation diverged or could not start.
"""

import logging
import sys
from pathlib import Path
from typing import NoReturn, Optional

import numpy as np
import typer
from rich.console import Console
from rich.panel import Panel

from swarmpath import __version__
from swarmpath.config import ExperimentConfig, get_settings

# ---------------------------------------------------------------------------
# Rich console
# ---------------------------------------------------------------------------

console = Console()

BRAND = "bold cyan"
SUCCESS = "bold green"
ERROR = "bold red"
DIM = "dim"

EXIT_CONFIG = 1
EXIT_NO_PATH = 2
EXIT_DIVERGED = 3

# ---------------------------------------------------------------------------
# Logging setup
# ---------------------------------------------------------------------------

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - [%(filename)s:%(lineno)d] - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def _setup_cli_logging() -> logging.Logger:
    """Configure CLI logging from settings (stderr plus optional file)."""
    settings = get_settings()
    level = getattr(logging, settings.log_level.upper(), logging.INFO)

    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if settings.log_file:
        Path(settings.log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(settings.log_file))

    logging.basicConfig(
        level=level,
        format=LOG_FORMAT,
        datefmt=DATE_FORMAT,
        handlers=handlers,
        force=True,
    )
    logging.getLogger("swarmpath").setLevel(level)

    logger = logging.getLogger("swarmpath.cli")
    logger.info(
        "CLI logging initialised  (level=%s, log_file=%s)",
        logging.getLevelName(level),
        settings.log_file,
    )
    return logger


logger = _setup_cli_logging()

# ---------------------------------------------------------------------------
# Typer app
# ---------------------------------------------------------------------------

app = typer.Typer(
    name="swp",
    help="swarmpath: swarm-planned spline paths and cascaded PID tracking for a two-wheeled robot.",
    add_completion=False,
    rich_markup_mode="rich",
)

# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _header(title: str) -> None:
    console.print()
    console.print(
        Panel(
            f"[bold cyan]swarmpath[/bold cyan]  [dim]·[/dim]  {title}",
            border_style="cyan",
            padding=(0, 2),
        )
    )
    console.print()


def _fail(message: str, code: int) -> NoReturn:
    console.print(f"  [red]✗[/red]  {message}")
    console.print()
    raise typer.Exit(code=code)


def _load_config(
    config: Optional[Path],
    seed: Optional[int] = None,
    runs: Optional[int] = None,
    jobs: Optional[int] = None,
    control_dt: Optional[float] = None,
) -> ExperimentConfig:
    """Load the experiment config and apply flags, exiting with code 1 on errors."""
    from swarmpath.config import ConfigError, apply_overrides, load_experiment_config

    settings = get_settings()
    if jobs is None and settings.jobs > 1:
        jobs = settings.jobs
    try:
        cfg = load_experiment_config(config)
        cfg = apply_overrides(cfg, seed=seed, runs=runs, jobs=jobs, control_dt=control_dt)
    except ConfigError as exc:
        logger.error("Config error: %s", exc)
        _fail(f"Config error: {exc}", EXIT_CONFIG)
    logger.debug("Config resolved: preset=%s", cfg.preset)
    return cfg


def _with_workspace_file(cfg: ExperimentConfig, workspace: Optional[Path]) -> ExperimentConfig:
    if workspace is None:
        return cfg
    from swarmpath.config import WorkspaceSection

    section = WorkspaceSection(
        file=str(workspace.resolve()), radius_override=cfg.workspace.radius_override
    )
    return cfg.model_copy(update={"workspace": section})


def _output_dir(output_dir: Optional[Path], command: str) -> Path:
    directory = output_dir or Path(get_settings().output_dir) / command
    directory.mkdir(parents=True, exist_ok=True)
    logger.debug("Output directory: %s", directory)
    return directory


def _manifest(
    command: str, cfg: ExperimentConfig, started_at: str, arguments: Optional[dict] = None
):
    from swarmpath.report.exporters import RunManifest

    return RunManifest(
        command=command,
        config=cfg.model_dump(mode="json"),
        arguments=arguments or {},
        seeds={
            "pso": cfg.pso.seed,
            "random_workspace": cfg.random_workspace.seed,
            "montecarlo": cfg.montecarlo.base_seed,
        },
        version=__version__,
        started_at=started_at,
    )


def _finish(directory: Path, manifest, outputs: list[Path]) -> None:
    from swarmpath.report.exporters import utc_now, write_manifest

    manifest.outputs = sorted(path.name for path in outputs)
    manifest.finished_at = utc_now()
    write_manifest(directory, manifest)
    for path in outputs:
        console.print(f"  [green]✓[/green]  {path}")
    console.print(f"  [green]✓[/green]  {directory / 'manifest.json'}")
    console.print()


def _parse_betas(betas: str) -> list[float]:
    values = [part.strip() for part in betas.split(",") if part.strip()]
    return [float(value) for value in values]


# ---------------------------------------------------------------------------
# Command: plan
# ---------------------------------------------------------------------------


@app.command()
def plan(
    config: Optional[Path] = typer.Option(
        None, "--config", "-c", help="Experiment TOML or manifest"
    ),
    workspace: Optional[Path] = typer.Option(
        None, "--workspace", "-w", help="Workspace JSON (overrides the config)"
    ),
    output_dir: Optional[Path] = typer.Option(None, "--output-dir", "-o", help="Output directory"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for swarm and random workspace"),
) -> None:
    """[bold cyan]Plan[/bold cyan] a collision-free spline path with the particle swarm."""
    logger.info("=" * 60)
    logger.info("CLI command: plan")
    logger.info("=" * 60)
    _header("Path Planning")

    from swarmpath.config import planning_workspace
    from swarmpath.planning import PlanningError
    from swarmpath.planning.pso import plan as run_plan
    from swarmpath.planning.workspace import dump_workspace
    from swarmpath.report.display import display_plan
    from swarmpath.report.exporters import (
        plan_summary,
        utc_now,
        write_history_csv,
        write_json,
        write_path_csv,
    )
    from swarmpath.report.renderer import render_series_svg, render_workspace_svg, write_svg

    started_at = utc_now()
    cfg = _with_workspace_file(_load_config(config, seed=seed), workspace)
    try:
        ws = planning_workspace(cfg)
        console.print(
            f"  [dim]Workspace:[/dim] [bold]{ws.name or 'inline'}[/bold]  "
            f"[dim]({len(ws.obstacles)} obstacles)[/dim]"
        )
        with console.status("[cyan]Optimizing...[/cyan]"):
            result = run_plan(ws, cfg.spline, cfg.cost, cfg.pso)
    except PlanningError as exc:
        logger.error("Planning failed: %s", exc)
        _fail(f"Planning failed: {exc}", EXIT_CONFIG)
    except Exception as exc:
        logger.error("Planning failed unexpectedly: %s", exc, exc_info=True)
        _fail(f"Planning failed: {exc}", EXIT_CONFIG)

    display_plan(result)
    directory = _output_dir(output_dir, "plan")
    iterations = np.arange(len(result.best_cost_history))
    workspace_file = directory / "workspace.json"
    workspace_file.write_text(dump_workspace(ws), encoding="utf-8")
    outputs = [
        write_path_csv(directory / "path.csv", result.best_path),
        write_history_csv(directory / "history.csv", result),
        write_json(directory / "plan.json", plan_summary(result)),
        workspace_file,
        write_svg(
            directory / "plan.svg",
            render_workspace_svg(
                ws,
                path=result.best_path.points,
                control_points=result.best_polygon.all_points(),
                title=f"Planned path ({ws.name or 'workspace'})",
            ),
        ),
        write_svg(
            directory / "convergence.svg",
            render_series_svg(
                "Convergence",
                iterations,
                {"best cost": result.best_cost_history, "mean cost": result.mean_cost_history},
                x_label="iteration",
                y_label="cost",
            ),
        ),
    ]
    _finish(directory, _manifest("plan", cfg, started_at), outputs)

    if not result.success:
        logger.warning("No collision-free path found (collision=%g)", result.best_cost.collision)
        _fail("No collision-free path found", EXIT_NO_PATH)
    logger.info("Plan command completed successfully")


# ---------------------------------------------------------------------------
# Command: track
# ---------------------------------------------------------------------------


@app.command()
def track(
    path_file: Path = typer.Argument(..., help="Path CSV written by 'swp plan'"),
    config: Optional[Path] = typer.Option(
        None, "--config", "-c", help="Experiment TOML or manifest"
    ),
    workspace: Optional[Path] = typer.Option(
        None, "--workspace", "-w", help="Workspace JSON (default: workspace.json next to the path)"
    ),
    output_dir: Optional[Path] = typer.Option(None, "--output-dir", "-o", help="Output directory"),
    control_dt: Optional[float] = typer.Option(None, "--control-dt", help="Sample time [s]"),
    offset_x: float = typer.Option(0.0, "--offset-x", help="Start x offset from the path [m]"),
    offset_y: float = typer.Option(0.0, "--offset-y", help="Start y offset from the path [m]"),
) -> None:
    """[bold cyan]Track[/bold cyan] a planned path with the cascaded PID controller."""
    logger.info("=" * 60)
    logger.info("CLI command: track")
    logger.info("=" * 60)
    _header("Trajectory Tracking")

    from swarmpath.config import resolve_workspace
    from swarmpath.planning import PlanningError
    from swarmpath.planning.workspace import load_workspace_file
    from swarmpath.report import ReportError
    from swarmpath.report.display import display_tracking
    from swarmpath.report.exporters import (
        load_path_csv,
        sim_summary,
        utc_now,
        write_duty_csv,
        write_json,
        write_trace_csv,
    )
    from swarmpath.report.renderer import render_series_svg, render_workspace_svg, write_svg
    from swarmpath.sim import SimulationError
    from swarmpath.sim.closed_loop import closed_loop_sim

    started_at = utc_now()
    cfg = _with_workspace_file(_load_config(config, control_dt=control_dt), workspace)
    if offset_x or offset_y:
        sim_cfg = cfg.sim.model_copy(update={"start_offset": (offset_x, offset_y)})
        cfg = cfg.model_copy(update={"sim": sim_cfg})

    try:
        planned = load_path_csv(path_file)
        ws = resolve_workspace(cfg)
        if ws is None:
            sibling = path_file.parent / "workspace.json"
            if not sibling.exists():
                _fail("No workspace given and no workspace.json next to the path", EXIT_CONFIG)
            ws = load_workspace_file(sibling)
    except (ReportError, PlanningError) as exc:
        logger.error("Input error: %s", exc)
        _fail(f"Input error: {exc}", EXIT_CONFIG)
    except typer.Exit:
        raise
    except Exception as exc:
        logger.error("Failed to read inputs: %s", exc, exc_info=True)
        _fail(f"Input error: {exc}", EXIT_CONFIG)

    console.print(
        f"  [dim]Path:[/dim] [bold]{path_file}[/bold]  "
        f"[dim]({len(planned)} samples, {planned.duration:g}s, "
        f"control_dt={cfg.controller.control_dt:g}s)[/dim]"
    )
    try:
        with console.status("[cyan]Simulating...[/cyan]"):
            sim = closed_loop_sim(ws, planned, cfg.controller, cfg.robot, cfg.sim)
    except SimulationError as exc:
        logger.error("Simulation failed: %s", exc)
        _fail(f"Simulation failed: {exc}", EXIT_DIVERGED)
    except Exception as exc:
        logger.error("Simulation failed unexpectedly: %s", exc, exc_info=True)
        _fail(f"Simulation failed: {exc}", EXIT_CONFIG)

    display_tracking(sim)
    directory = _output_dir(output_dir, "track")
    duty_times = np.array([s.t for s in sim.duty])
    signed = {
        "left": np.array([s.duty_L if s.dir_L == "forward" else -s.duty_L for s in sim.duty]),
        "right": np.array([s.duty_R if s.dir_R == "forward" else -s.duty_R for s in sim.duty]),
    }
    outputs = [
        write_trace_csv(directory / "trace.csv", sim),
        write_duty_csv(directory / "duty.csv", sim),
        write_json(directory / "track.json", sim_summary(sim)),
        write_svg(
            directory / "track.svg",
            render_workspace_svg(
                ws,
                path=sim.reference_path.points,
                trajectory=sim.trajectory,
                title="Reference and driven path",
            ),
        ),
        write_svg(
            directory / "duty.svg",
            render_series_svg(
                "PWM duty cycle", duty_times, signed, x_label="t [s]", y_label="duty (signed)"
            ),
        ),
    ]
    manifest = _manifest("track", cfg, started_at, {"path_file": str(path_file.resolve())})
    _finish(directory, manifest, outputs)
    logger.info("Track command completed successfully")


# ---------------------------------------------------------------------------
# Command: montecarlo
# ---------------------------------------------------------------------------


@app.command()
def montecarlo(
    config: Optional[Path] = typer.Option(
        None, "--config", "-c", help="Experiment TOML or manifest"
    ),
    output_dir: Optional[Path] = typer.Option(None, "--output-dir", "-o", help="Output directory"),
    runs: Optional[int] = typer.Option(None, "--runs", "-n", help="Number of runs"),
    jobs: Optional[int] = typer.Option(None, "--jobs", "-j", help="Worker processes"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Base seed"),
) -> None:
    """[bold cyan]Monte Carlo[/bold cyan] campaign of planning runs."""
    logger.info("=" * 60)
    logger.info("CLI command: montecarlo")
    logger.info("=" * 60)
    _header("Monte Carlo Campaign")

    from swarmpath.config import resolve_workspace
    from swarmpath.planning import PlanningError
    from swarmpath.report.display import display_report
    from swarmpath.report.exporters import utc_now, write_json, write_runs_csv
    from swarmpath.report.renderer import render_bars_svg, write_svg
    from swarmpath.sim.montecarlo import monte_carlo

    started_at = utc_now()
    cfg = _load_config(config, seed=seed, runs=runs, jobs=jobs)
    try:
        ws = resolve_workspace(cfg)
        if cfg.montecarlo.mode == "fixed" and ws is None:
            _fail("Fixed mode needs a [workspace] section", EXIT_CONFIG)
        console.print(
            f"  [dim]Runs:[/dim] [bold]{cfg.montecarlo.runs}[/bold]  "
            f"[dim]mode={cfg.montecarlo.mode}, jobs={cfg.montecarlo.jobs}[/dim]"
        )
        with console.status("[cyan]Running campaign...[/cyan]"):
            report = monte_carlo(
                cfg.montecarlo, cfg.spline, cfg.cost, cfg.pso, cfg.random_workspace, ws
            )
    except PlanningError as exc:
        logger.error("Campaign failed: %s", exc)
        _fail(f"Campaign failed: {exc}", EXIT_CONFIG)
    except typer.Exit:
        raise
    except Exception as exc:
        logger.error("Campaign failed unexpectedly: %s", exc, exc_info=True)
        _fail(f"Campaign failed: {exc}", EXIT_CONFIG)

    display_report(report)
    directory = _output_dir(output_dir, "montecarlo")
    outputs = [
        write_json(directory / "report.json", report.model_dump(mode="json")),
        write_json(directory / "report.deterministic.json", report.deterministic_dump()),
        write_runs_csv(directory / "runs.csv", report),
        write_svg(
            directory / "summary.svg",
            render_bars_svg(
                "Monte Carlo summary",
                ["SR [%]", "avg length [m]", "SD [m]", "CPU-T [s]", "CT [s]"],
                [
                    report.success_rate * 100,
                    report.avg_length,
                    report.length_sd,
                    report.avg_cpu_time,
                    report.avg_convergence_time,
                ],
            ),
        ),
    ]
    _finish(directory, _manifest("montecarlo", cfg, started_at), outputs)
    logger.info("Montecarlo command completed successfully")


# ---------------------------------------------------------------------------
# Command: sweep
# ---------------------------------------------------------------------------


@app.command()
def sweep(
    betas: str = typer.Option("50,100,150", "--betas", "-b", help="Comma-separated beta_p values"),
    config: Optional[Path] = typer.Option(
        None, "--config", "-c", help="Experiment TOML or manifest"
    ),
    output_dir: Optional[Path] = typer.Option(None, "--output-dir", "-o", help="Output directory"),
    runs: Optional[int] = typer.Option(None, "--runs", "-n", help="Runs per beta"),
    jobs: Optional[int] = typer.Option(None, "--jobs", "-j", help="Worker processes"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Base seed"),
) -> None:
    """[bold cyan]Sweep[/bold cyan] the penalty coefficient on identical seeds."""
    logger.info("=" * 60)
    logger.info("CLI command: sweep")
    logger.info("=" * 60)
    _header("Penalty Coefficient Sweep")

    from swarmpath.config import resolve_workspace
    from swarmpath.planning import PlanningError
    from swarmpath.report.display import display_sweep
    from swarmpath.report.exporters import sweep_summary, utc_now, write_json, write_sweep_csv
    from swarmpath.report.renderer import render_bars_svg, write_svg
    from swarmpath.sim.montecarlo import beta_sweep

    started_at = utc_now()
    try:
        values = _parse_betas(betas)
    except ValueError:
        _fail(f"Invalid --betas value: {betas!r}", EXIT_CONFIG)
    if not values:
        _fail("--betas must name at least one value", EXIT_CONFIG)
    if any(value < 0 for value in values):
        _fail("--betas values must be non-negative", EXIT_CONFIG)

    cfg = _load_config(config, seed=seed, runs=runs, jobs=jobs)
    try:
        ws = resolve_workspace(cfg)
        if cfg.montecarlo.mode == "fixed" and ws is None:
            _fail("Fixed mode needs a [workspace] section", EXIT_CONFIG)
        with console.status("[cyan]Sweeping...[/cyan]"):
            entries = beta_sweep(
                values, cfg.montecarlo, cfg.spline, cfg.cost, cfg.pso, cfg.random_workspace, ws
            )
    except PlanningError as exc:
        logger.error("Sweep failed: %s", exc)
        _fail(f"Sweep failed: {exc}", EXIT_CONFIG)
    except typer.Exit:
        raise
    except Exception as exc:
        logger.error("Sweep failed unexpectedly: %s", exc, exc_info=True)
        _fail(f"Sweep failed: {exc}", EXIT_CONFIG)

    display_sweep(entries)
    directory = _output_dir(output_dir, "sweep")
    labels = [f"beta={e.beta:g}" for e in entries]
    outputs = [
        write_sweep_csv(directory / "sweep.csv", entries),
        write_json(directory / "sweep.json", sweep_summary(entries)),
        write_svg(
            directory / "sweep_success.svg",
            render_bars_svg(
                "Success rate per beta",
                labels,
                [e.report.success_rate * 100 for e in entries],
                y_label="SR [%]",
            ),
        ),
        write_svg(
            directory / "sweep_length.svg",
            render_bars_svg(
                "Average successful length per beta",
                labels,
                [e.report.avg_length for e in entries],
                y_label="length [m]",
            ),
        ),
    ]
    manifest = _manifest("sweep", cfg, started_at, {"betas": values})
    _finish(directory, manifest, outputs)
    logger.info("Sweep command completed successfully")


# ---------------------------------------------------------------------------
# Command: validate-config
# ---------------------------------------------------------------------------


@app.command("validate-config")
def validate_config(
    config: Path = typer.Argument(..., help="Experiment TOML or manifest"),
) -> None:
    """[bold cyan]Validate[/bold cyan] an experiment config without running anything."""
    logger.info("=" * 60)
    logger.info("CLI command: validate-config")
    logger.info("=" * 60)
    _header("Config Validation")

    from swarmpath.config import resolve_workspace
    from swarmpath.planning import PlanningError

    cfg = _load_config(config)
    try:
        ws = resolve_workspace(cfg)
    except PlanningError as exc:
        logger.error("Workspace error: %s", exc)
        _fail(f"Workspace error: {exc}", EXIT_CONFIG)

    console.print(f"  [green]✓[/green]  Config valid  [dim](preset={cfg.preset})[/dim]")
    if ws is not None:
        console.print(
            f"  [green]✓[/green]  Workspace [bold]{ws.name or 'inline'}[/bold]  "
            f"[dim]{len(ws.obstacles)} obstacles[/dim]"
        )
    else:
        console.print("  [dim]No workspace section: random workspaces will be generated[/dim]")
    console.print()
    logger.info("Config %s is valid", config)


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def cli_main() -> None:
    """Entry point for the CLI."""
    logger.debug("CLI entry point invoked with args: %s", sys.argv)
    app()


if __name__ == "__main__":
    cli_main()
