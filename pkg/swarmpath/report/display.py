"""Rich terminal summaries for command results."""

import logging
from typing import Optional

from rich.console import Console
from rich.table import Table

from swarmpath.planning.pso import PlanResult
from swarmpath.sim.closed_loop import SimResult
from swarmpath.sim.montecarlo import McReport, SweepEntry

logger = logging.getLogger(__name__)
console = Console()

RULE = "━" * 52


def _fmt(value: Optional[float], unit: str = "", digits: int = 4) -> str:
    if value is None:
        return "n/a"
    return f"{value:.{digits}f}{unit}"


def _pairs_table(rows: list[tuple[str, str]]) -> Table:
    table = Table(show_header=False, box=None, padding=(0, 2))
    table.add_column("Label", style="dim", width=26)
    table.add_column("Value", style="bold")
    for label, value in rows:
        table.add_row(label, value)
    return table


def display_plan(result: PlanResult) -> None:
    cost = result.best_cost
    status = "[green]collision-free[/green]" if result.success else "[red]collides[/red]"
    console.print("[bold]Planning Result[/bold]")
    console.print(RULE)
    console.print(
        _pairs_table(
            [
                ("Status", status),
                ("Seed", str(result.seed)),
                ("Path length", _fmt(cost.length, " m")),
                ("Total cost", _fmt(cost.total)),
                ("Collision violation", _fmt(cost.collision, digits=6)),
                ("Velocity violation", _fmt(cost.velocity, digits=6)),
                ("Acceleration violation", _fmt(cost.acceleration, digits=6)),
                ("Converged at iteration", str(result.converged_at_iteration)),
                ("CPU time", _fmt(result.cpu_time, " s", 2)),
            ]
        )
    )
    console.print()


def display_tracking(sim: SimResult) -> None:
    status = "[red]yes[/red]" if sim.collided else "[green]no[/green]"
    console.print("[bold]Tracking Result[/bold]")
    console.print(RULE)
    console.print(
        _pairs_table(
            [
                ("Final position error", _fmt(sim.final_position_error, " m")),
                ("Max tracking error", _fmt(float(sim.tracking_error.max()), " m")),
                ("Distance traveled", _fmt(sim.distance_traveled, " m")),
                ("Planned length", _fmt(sim.planned_length, " m")),
                ("Obstacle penetration", status),
                ("Simulated time", _fmt(float(sim.times[-1]), " s", 2)),
            ]
        )
    )
    console.print()


def display_report(report: McReport) -> None:
    console.print("[bold]Monte Carlo Report[/bold]")
    console.print(RULE)
    console.print(
        _pairs_table(
            [
                ("Runs", str(report.runs)),
                ("Success rate", f"{report.success_rate * 100:.2f}%"),
                ("Average length", _fmt(report.avg_length, " m")),
                ("Shortest length", _fmt(report.shortest_length, " m")),
                ("Length SD", _fmt(report.length_sd, " m")),
                ("Average CPU time", _fmt(report.avg_cpu_time, " s", 2)),
                ("Average convergence time", _fmt(report.avg_convergence_time, " s", 2)),
            ]
        )
    )
    console.print()


def display_sweep(entries: list[SweepEntry]) -> None:
    console.print("[bold]Penalty Coefficient Sweep[/bold]")
    console.print(RULE)
    table = Table(show_header=True, box=None, padding=(0, 1))
    table.add_column("beta", justify="right")
    table.add_column("SR", justify="right")
    table.add_column("Avg length", justify="right")
    table.add_column("Shortest", justify="right")
    table.add_column("SD", justify="right")
    table.add_column("CPU-T", justify="right")
    for entry in entries:
        report = entry.report
        table.add_row(
            f"{entry.beta:g}",
            f"{report.success_rate * 100:.1f}%",
            _fmt(report.avg_length, digits=3),
            _fmt(report.shortest_length, digits=3),
            _fmt(report.length_sd, digits=3),
            _fmt(report.avg_cpu_time, digits=2),
        )
    console.print(table)
    console.print()
