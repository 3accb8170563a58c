"""CLI entry points for anticipatory-tamp."""

from __future__ import annotations

import json
import random
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

import typer
from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, SpinnerColumn, TextColumn

from anticipatory_tamp.errors import AntTampError
from anticipatory_tamp.models.types import Domain, Scenario, Variant
from anticipatory_tamp.scenario.builtin import default_scenario
from anticipatory_tamp.scenario.loader import load_scenario, load_settings

app = typer.Typer(
    name="anticipatory-tamp",
    help="Task and motion planning that anticipates the next task in a persistent environment.",
    no_args_is_help=True,
)
dataset_app = typer.Typer(help="Generate oracle-labelled training data.", no_args_is_help=True)
model_app = typer.Typer(help="Train and evaluate the learned cost estimator.", no_args_is_help=True)
app.add_typer(dataset_app, name="dataset")
app.add_typer(model_app, name="model")
console = Console()

# ---------------------------------------------------------------------------
# Shared options
# ---------------------------------------------------------------------------


@contextmanager
def _reported_errors() -> Iterator[None]:
    try:
        yield
    except AntTampError as e:
        console.print(f"[red]{e}[/red]")
        raise typer.Exit(1) from e


def _scenario(
    domain: Domain | None,
    scenario_file: Path | None,
    objects: int | None = None,
    multi_class: bool = False,
) -> Scenario:
    if scenario_file is not None:
        scenario = load_scenario(scenario_file)
        if domain is not None and scenario.domain != domain:
            console.print(f"[red]{scenario_file} is a {scenario.domain} scenario, not {domain}[/red]")
            raise typer.Exit(1)
        return scenario
    return default_scenario(domain or Domain.NAMO, objects, multi_class)


def _progress() -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        console=console,
    )


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


@app.command()
def run(
    domain: Domain | None = typer.Option(None, "--domain", "-d", help="namo or cabinet"),
    scenario_file: Path | None = typer.Option(None, "--scenario", help="Scenario YAML (default: built-in)"),
    variants: list[Variant] | None = typer.Option(None, "--variant", help="Planner variant; repeatable (default: all)"),
    estimator: str = typer.Option("oracle", "--estimator", "-e", help="zero | oracle | model:<checkpoint>"),
    trials: int | None = typer.Option(None, "--trials", "-k", help="Trials per variant"),
    tasks: int | None = typer.Option(None, "--tasks", "-l", help="Tasks per trial"),
    seed: int = typer.Option(0, "--seed", "-s"),
    out: Path | None = typer.Option(None, "--out", "-o", help="Result directory"),
    candidates: int | None = typer.Option(None, "--candidates", "-n", help="Candidate plans per task"),
    prep_samples: int | None = typer.Option(None, "--prep-samples", help="Annealing iterations"),
    objects: int | None = typer.Option(None, "--objects", help="Blocks in the built-in namo scenario (1-10)"),
    multi_class: bool = typer.Option(False, "--multi-class", help="Multi-class tasks in the built-in cabinet"),
    oracle_samples: int | None = typer.Option(None, "--oracle-samples", help="Solver samples per task in the oracle"),
    full: bool = typer.Option(False, "--full", help="Use the long trial counts"),
    snapshots: bool = typer.Option(False, "--snapshots", help="Write snap_*.svg for each trial"),
    timing: bool = typer.Option(False, "--timing", help="Record wall-clock time per task"),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """Run deployments and write results.csv and summary.json."""
    from anticipatory_tamp.harness.deployment import DeploymentConfig, build_estimator, run_deployment
    from anticipatory_tamp.harness.summary import summarize
    from anticipatory_tamp.output.report import print_summary, print_trial
    from anticipatory_tamp.output.results import write_results, write_summary
    from anticipatory_tamp.output.snapshot import render_snapshot

    with _reported_errors():
        settings = load_settings()
        scenario = _scenario(domain, scenario_file, objects, multi_class)
        samples = oracle_samples or settings.oracle_samples
        cost_estimator = build_estimator(estimator, scenario, samples)
        out_dir = out or Path(settings.output_dir)

        configs, records = [], []
        for variant in variants or list(Variant):
            config = DeploymentConfig.for_domain(
                scenario.domain,
                full=full,
                scenario_path=str(scenario_file) if scenario_file else None,
                variant=variant,
                estimator=estimator,
                n_trials=trials,
                sequence_length=tasks,
                seed=seed,
                n_candidates=candidates,
                prep_iterations=prep_samples,
                oracle_samples=samples,
                workers=settings.workers,
                timing=timing,
            )
            with _progress() as progress:
                progress.add_task(f"{variant}: {config.n_trials} trials x {config.sequence_length} tasks", total=None)
                variant_records = run_deployment(config, scenario, cost_estimator)
            configs.append(config)
            records.extend(variant_records)
            if verbose:
                for record in variant_records:
                    print_trial(record)

        summary = summarize(records)
        write_results(records, out_dir / "results.csv")
        write_summary(summary, configs, records, out_dir / "summary.json")
        if snapshots:
            for record in records:
                stem = f"snap_{record.variant}_t{record.trial:03d}"
                render_snapshot(scenario, record.initial, out_dir / f"{stem}_initial.svg", f"{stem} initial")
                if record.prepared is not None:
                    render_snapshot(scenario, record.prepared, out_dir / f"{stem}_prepared.svg", f"{stem} prepared")
                render_snapshot(scenario, record.final, out_dir / f"{stem}_final.svg", f"{stem} final")

    print_summary(summary, scenario.name)
    console.print(f"[green]Results written to {out_dir}[/green]")


@app.command()
def tasks(
    domain: Domain | None = typer.Option(None, "--domain", "-d"),
    scenario_file: Path | None = typer.Option(None, "--scenario"),
    objects: int | None = typer.Option(None, "--objects"),
    multi_class: bool = typer.Option(False, "--multi-class"),
    output_json: bool = typer.Option(False, "--json", help="Output as JSON"),
):
    """List a scenario's task distribution."""
    from anticipatory_tamp.output.report import print_tasks
    from anticipatory_tamp.planning.solver import task_distribution

    with _reported_errors():
        scenario = _scenario(domain, scenario_file, objects, multi_class)
        dist = task_distribution(scenario)

    if output_json:
        data = [{"label": t.label, "p": p, "goal": sorted(str(f) for f in t.goal)} for t, p in dist.entries]
        console.print_json(json.dumps(data, indent=2))
    else:
        print_tasks(scenario, dist)


@app.command()
def snapshot(
    output: Path = typer.Argument(..., help="SVG file to write"),
    domain: Domain | None = typer.Option(None, "--domain", "-d"),
    scenario_file: Path | None = typer.Option(None, "--scenario"),
    objects: int | None = typer.Option(None, "--objects"),
    seed: int | None = typer.Option(None, "--seed", "-s", help="Draw a random state instead of the scenario's own"),
):
    """Render a scenario state to SVG."""
    from anticipatory_tamp.output.snapshot import render_snapshot
    from anticipatory_tamp.planning.solver import random_state

    with _reported_errors():
        scenario = _scenario(domain, scenario_file, objects)
        state = scenario.initial_state() if seed is None else random_state(scenario, random.Random(seed))
        render_snapshot(scenario, state, output, scenario.name)
    console.print(f"[green]Snapshot written to {output}[/green]")


# ---------------------------------------------------------------------------
# dataset / model
# ---------------------------------------------------------------------------


@dataset_app.command("gen")
def dataset_gen(
    output: Path = typer.Argument(..., help="Dataset file (.jsonl)"),
    domain: Domain | None = typer.Option(None, "--domain", "-d"),
    scenario_file: Path | None = typer.Option(None, "--scenario"),
    objects: int | None = typer.Option(None, "--objects"),
    multi_class: bool = typer.Option(False, "--multi-class"),
    size: int | None = typer.Option(None, "--size", "-n", help="Number of states (default: 10000 namo, 5000 cabinet)"),
    seed: int = typer.Option(0, "--seed", "-s"),
    oracle_samples: int | None = typer.Option(None, "--oracle-samples"),
):
    """Sample random states and label them with the oracle."""
    from anticipatory_tamp.domain import rules
    from anticipatory_tamp.learning.dataset import generate_dataset, save_dataset

    with _reported_errors():
        settings = load_settings()
        scenario = _scenario(domain, scenario_file, objects, multi_class)
        default_size = rules.NAMO_DATASET_SIZE if scenario.domain == Domain.NAMO else rules.CABINET_DATASET_SIZE
        n = size or default_size
        with _progress() as progress:
            bar = progress.add_task(f"labelling {scenario.name} states", total=n)
            dataset = generate_dataset(
                scenario,
                n,
                seed,
                samples_per_task=oracle_samples or settings.oracle_samples,
                workers=settings.workers,
                on_sample=lambda _: progress.advance(bar),
            )
        save_dataset(dataset, output)
    console.print(f"[green]{len(dataset)} samples written to {output}[/green]")


@model_app.command("train")
def model_train(
    dataset_file: Path = typer.Argument(..., help="Dataset file from 'dataset gen'"),
    output: Path = typer.Option(Path("model.npz"), "--out", "-o", help="Checkpoint to write"),
    epochs: int | None = typer.Option(None, "--epochs"),
    learning_rate: float | None = typer.Option(None, "--lr"),
    batch_size: int | None = typer.Option(None, "--batch-size"),
    seed: int = typer.Option(0, "--seed", "-s"),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """Fit the scene-graph regressor to a dataset."""
    from anticipatory_tamp.learning.dataset import load_dataset
    from anticipatory_tamp.learning.training import TrainingConfig, save_model, train
    from anticipatory_tamp.output.report import print_training

    overrides = {"epochs": epochs, "learning_rate": learning_rate, "batch_size": batch_size}
    config = TrainingConfig(seed=seed, **{k: v for k, v in overrides.items() if v is not None})
    with _reported_errors():
        dataset = load_dataset(dataset_file)
        result = train(dataset, config, verbose=verbose)
        save_model(result.model, output)
    print_training(result)
    console.print(f"[green]Model written to {output}[/green]")


@model_app.command("eval")
def model_eval(
    model_file: Path = typer.Argument(..., help="Checkpoint from 'model train'"),
    dataset_file: Path = typer.Argument(..., help="Held-out dataset"),
):
    """Compare model predictions with the dataset's oracle labels."""
    from anticipatory_tamp.learning.dataset import load_dataset
    from anticipatory_tamp.learning.training import evaluate_model, load_model
    from anticipatory_tamp.output.report import print_evaluation

    with _reported_errors():
        evaluation = evaluate_model(load_model(model_file), load_dataset(dataset_file))
    print_evaluation(evaluation)


def main():
    app()


if __name__ == "__main__":
    main()
