"""Rich terminal output for deployment summaries, task lists and model evaluations."""

from __future__ import annotations

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from anticipatory_tamp.harness.deployment import TrialRecord
from anticipatory_tamp.harness.summary import Summary
from anticipatory_tamp.learning.training import Evaluation, TrainingResult
from anticipatory_tamp.models.types import Scenario, TaskDistribution, Variant

console = Console()

VARIANT_STYLES = {
    Variant.MYOPIC: "white",
    Variant.ANTTAMP: "cyan",
    Variant.PREP_MYOPIC: "yellow",
    Variant.PREP_ANTTAMP: "green",
}


def print_summary(summary: Summary, title: str = "") -> None:
    """Per-variant cost table followed by the cost-over-time curves."""
    console.print()
    console.print(Panel(f"[bold]Deployment summary[/bold]{': ' + title if title else ''}", border_style="cyan"))

    improvements = summary.improvements
    table = Table(show_header=True, header_style="bold")
    table.add_column("Variant")
    table.add_column("Trials", justify="right")
    table.add_column("Failed", justify="right")
    table.add_column("Cost / task", justify="right")
    table.add_column("vs Myopic", justify="right")
    table.add_column("Slope", justify="right")
    table.add_column("Prep cost", justify="right", style="dim")

    for variant, s in summary.variants.items():
        style = VARIANT_STYLES[variant]
        pct = improvements.get(variant)
        pct_text = "-" if pct is None else f"[{'green' if pct > 0 else 'red'}]{pct:+.1f}%[/]"
        table.add_row(
            f"[{style}]{variant}[/{style}]",
            str(s.n_trials),
            f"[red]{s.n_failed}[/red]" if s.n_failed else "0",
            f"{s.mean_cost:.1f}",
            pct_text,
            f"{s.slope:+.2f}",
            f"{s.preparation_cost:.2f}" if variant.prepares else "-",
        )
    console.print(table)

    curves = Table(show_header=True, header_style="bold", title="Mean cost by task index")
    curves.add_column("Variant")
    curves.add_column("Curve")
    for variant, s in summary.variants.items():
        curves.add_row(variant, " ".join(f"{c:.0f}" for c in s.curve) or "-")
    console.print(curves)


def print_trial(record: TrialRecord) -> None:
    """Task-by-task listing of one trial's chosen plans."""
    header = f"[bold]trial {record.trial}[/bold] ({record.variant})"
    if record.error:
        header += f" [red]aborted: {record.error}[/red]"
    console.print(header)
    for task in record.tasks:
        console.print(f"  {task.task_index:>3}  {task.label:<24} [bold]{task.cost:8.1f}[/bold]")
        for action in task.actions:
            console.print(f"       [dim]{action}[/dim]")


def print_tasks(scenario: Scenario, dist: TaskDistribution) -> None:
    table = Table(show_header=True, header_style="bold", title=f"Tasks in '{scenario.name}'")
    table.add_column("Task", style="cyan")
    table.add_column("P", justify="right")
    table.add_column("Goal")
    for task, p in dist.entries:
        table.add_row(task.label, f"{p:.3f}", ", ".join(str(f) for f in sorted(task.goal)))
    console.print(table)


def print_training(result: TrainingResult) -> None:
    table = Table(show_header=True, header_style="bold", title="Training")
    table.add_column("Epoch", justify="right")
    table.add_column("Train MAE", justify="right")
    table.add_column("Val MAE", justify="right")
    for log in result.history:
        val = "-" if log.validation_mae is None else f"{log.validation_mae:.3f}"
        table.add_row(str(log.epoch), f"{log.train_mae:.3f}", val)
    console.print(table)
    console.print(f"[dim]{result.train_size} training / {result.validation_size} validation samples[/dim]")


def print_evaluation(evaluation: Evaluation) -> None:
    rho = evaluation.spearman
    rho_style = "green" if rho >= 0.7 else "yellow"
    console.print(
        Panel(
            f"samples: {evaluation.count}\n"
            f"MAE: {evaluation.mae:.3f}\n"
            f"Spearman: [{rho_style}]{rho:.3f}[/{rho_style}]",
            title="Model evaluation",
            border_style="cyan",
        )
    )
