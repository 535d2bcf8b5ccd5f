from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path
from typing import Any

from rich import box
from rich.console import Console
from rich.table import Table

from src.calibration import PERCENTILES, CalibrationReport
from src.experiment.metrics import IterationMetrics

NOT_APPLICABLE = "n/a"


def _format_float(value: float | None, digits: int = 2) -> str:
    return NOT_APPLICABLE if value is None else f"{value:.{digits}f}"


def _format_loss(row: dict[str, Any]) -> str:
    if row.get("loss") is None:
        return NOT_APPLICABLE
    return f"{row['loss']:.2f} ± {row.get('loss_std') or 0.0:.2f}"


def _build_summary_table(title: str) -> Table:
    table = Table(title=title, box=box.ROUNDED, caption="Loss = expert reward - agent reward (final iteration)")
    table.add_column("Env", style="cyan", no_wrap=True)
    table.add_column("Algorithm", style="cyan", no_wrap=True)
    table.add_column("Seed", justify="right", style="blue")
    table.add_column("Queries", justify="right", style="magenta")
    table.add_column("Loss\n[dim](mean ± std)[/dim]", justify="right", style="green")
    table.add_column("Efficiency", justify="right", style="bold green")
    table.add_column("Status", style="yellow")
    return table


def print_summary(rows: Sequence[dict[str, Any]], console: Console | None = None) -> None:
    """
    Render the suite summary: one row per run, laid out like a comparison table
    of algorithms (queries, loss ± std, query efficiency).
    """
    console = console or Console()
    if not rows:
        console.print("[yellow]No results to display.[/yellow]")
        return

    table = _build_summary_table("RadGrad Benchmark Summary")
    for row in rows:
        status = row["status"]
        if status != "ok":
            status = f"[red]{status}[/red]: {row.get('error') or ''}"
        queries = row.get("queries")
        table.add_row(
            row["env"],
            row["algorithm"],
            str(row["seed"]),
            NOT_APPLICABLE if queries is None else f"{queries:,}",
            _format_loss(row),
            _format_float(row.get("efficiency"), 1),
            status,
        )
    console.print(table)


def print_metrics(path: Path, metrics: Sequence[IterationMetrics], console: Console | None = None) -> None:
    """Per-iteration view of one metric CSV (the ``replot`` command)."""
    console = console or Console()
    table = Table(title=str(path), box=box.SIMPLE)
    table.add_column("Iteration", justify="right", style="cyan")
    table.add_column("Loss", justify="right", style="green")
    table.add_column("Std", justify="right", style="green")
    table.add_column("Total queries", justify="right", style="magenta")
    for m in metrics:
        table.add_row(
            str(m.iteration),
            f"{m.mean_loss_vs_expert:.3f}",
            f"{m.loss_std:.3f}",
            f"{m.cumulative_queries:,}",
        )
    console.print(table)


def print_calibration(report: CalibrationReport, console: Console | None = None) -> None:
    console = console or Console()
    table = Table(
        title=f"Threshold calibration: {report.env} (seed {report.seed}, {report.variant} loss net)",
        box=box.ROUNDED,
        caption=f"{report.samples} on-policy states",
    )
    table.add_column("Signal", style="cyan")
    for p in PERCENTILES:
        table.add_column(f"p{p}", justify="right")
    table.add_row("l_hat", *(f"{report.l_hat[p]:.4g}" for p in PERCENTILES))
    table.add_row("grad norm", *(f"{report.grad_norm[p]:.4g}" for p in PERCENTILES))
    if report.discrepancy:
        table.add_row("||a* - a_hat||", *(f"{report.discrepancy[p]:.4g}" for p in PERCENTILES))
    console.print(table)

    console.print(f"Suggested tau     = [bold]{report.tau:.4g}[/bold]")
    console.print(f"Suggested epsilon = [bold]{report.epsilon:.4g}[/bold]")
    if report.label_tau is not None:
        console.print(f"Suggested classifier label tau = [bold]{report.label_tau:.4g}[/bold]")
    for warning in report.warnings:
        console.print(f"[yellow]warning:[/yellow] {warning}")


def print_catalog(
    strategies: Sequence[tuple[str, str]], environments: Sequence[str], console: Console | None = None
) -> None:
    console = console or Console()
    table = Table(title="Strategies", box=box.SIMPLE)
    table.add_column("Name", style="cyan", no_wrap=True)
    table.add_column("Rule")
    for name, description in strategies:
        table.add_row(name, description)
    console.print(table)
    console.print("Environments: " + ", ".join(environments))


__all__ = ["print_calibration", "print_catalog", "print_metrics", "print_summary"]
