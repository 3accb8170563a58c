"""Deployment runs: task sequences in a persistent environment under one planner variant.

Every random choice draws from a named stream derived from the root seed, so
the task sequence of trial ``t`` is the same whichever variant runs it, and a
rerun with the same config reproduces every record exactly.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from pydantic import BaseModel, Field, field_validator
from rich.console import Console

from anticipatory_tamp.domain import core, rules
from anticipatory_tamp.domain.core import CostEstimator, ZeroEstimator
from anticipatory_tamp.errors import AntTampError, InvalidPlanError, RefinementFailure, ScenarioError
from anticipatory_tamp.harness.seeds import derive_seed, stream
from anticipatory_tamp.learning.oracle import OracleEstimator
from anticipatory_tamp.learning.training import LearnedEstimator, load_model
from anticipatory_tamp.models.types import (
    AnnealingSchedule,
    Domain,
    Plan,
    Scenario,
    SolverConfig,
    Task,
    Variant,
    WorldState,
)
from anticipatory_tamp.planning import annealing, solver
from anticipatory_tamp.planning.planner import PlannerConfig, anticipatory_tamp

console = Console(stderr=True)


class DeploymentConfig(BaseModel):
    domain: Domain
    scenario_path: str | None = None
    variant: Variant = Variant.MYOPIC
    estimator: str = "oracle"
    sequence_length: int = Field(rules.NAMO_SEQUENCE_LENGTH, ge=0)
    n_trials: int = Field(rules.NAMO_TRIALS, ge=1)
    seed: int = 0
    n_candidates: int = Field(rules.NAMO_CANDIDATES, ge=1)
    prep_iterations: int = Field(rules.NAMO_PREP_ITERATIONS, ge=0)
    oracle_samples: int = Field(rules.ORACLE_SAMPLES_PER_TASK, ge=1)
    workers: int = Field(1, ge=1)
    timing: bool = False

    @field_validator("estimator")
    @classmethod
    def _check_estimator(cls, v: str) -> str:
        if v in ("zero", "oracle") or (v.startswith("model:") and len(v) > len("model:")):
            return v
        raise ValueError(f"estimator must be zero, oracle or model:<path>, got '{v}'")

    @classmethod
    def for_domain(cls, domain: Domain, full: bool = False, **overrides: object) -> DeploymentConfig:
        """Published defaults for ``domain``; ``full`` selects the long trial counts."""
        if domain == Domain.NAMO:
            defaults = {
                "sequence_length": rules.NAMO_SEQUENCE_LENGTH,
                "n_trials": rules.NAMO_FULL_TRIALS if full else rules.NAMO_TRIALS,
                "n_candidates": rules.NAMO_CANDIDATES,
                "prep_iterations": rules.NAMO_PREP_ITERATIONS,
            }
        else:
            defaults = {
                "sequence_length": rules.CABINET_SEQUENCE_LENGTH,
                "n_trials": rules.CABINET_FULL_TRIALS if full else rules.CABINET_TRIALS,
                "n_candidates": rules.CABINET_CANDIDATES,
                "prep_iterations": rules.CABINET_PREP_ITERATIONS,
            }
        defaults.update({k: v for k, v in overrides.items() if v is not None})
        return cls(domain=domain, **defaults)


@dataclass
class TaskRecord:
    task_index: int
    label: str
    cost: float
    actions: list[str]
    initial: WorldState
    terminal: WorldState
    wallclock: float | None = None


@dataclass
class TrialRecord:
    trial: int
    variant: Variant
    seed: int
    initial: WorldState
    prepared: WorldState | None = None
    preparation_cost: float = 0.0
    tasks: list[TaskRecord] = field(default_factory=list)
    error: str | None = None

    @property
    def costs(self) -> list[float]:
        return [t.cost for t in self.tasks]

    @property
    def start(self) -> WorldState:
        return self.prepared if self.prepared is not None else self.initial

    @property
    def final(self) -> WorldState:
        return self.tasks[-1].terminal if self.tasks else self.start


# ---------------------------------------------------------------------------
# Seeded draws
# ---------------------------------------------------------------------------


def initial_state(scenario: Scenario, seed: int, trial: int) -> WorldState:
    """Random initial object poses over the scenario's fixed geometry."""
    for attempt in range(rules.STATE_RETRY_BUDGET):
        try:
            return solver.random_state(scenario, stream(seed, "trial", trial, "initial", attempt))
        except RefinementFailure:
            continue
    raise ScenarioError(f"could not sample an initial state for trial {trial}")


def task_sequence(scenario: Scenario, seed: int, trial: int, length: int) -> list[Task]:
    """I.i.d. draws from the scenario's task distribution; independent of the planner."""
    dist = solver.task_distribution(scenario)
    rng = stream(seed, "trial", trial, "tasks")
    return rng.choices(dist.tasks, weights=dist.probabilities, k=length)


# ---------------------------------------------------------------------------
# Runs
# ---------------------------------------------------------------------------


def check_chain(record: TrialRecord) -> None:
    """Each task must start where the previous one ended."""
    state = record.start
    for task in record.tasks:
        if not core.same_environment(state, task.initial):
            raise InvalidPlanError(task.task_index, f"trial {record.trial}: chain broken")
        state = task.terminal


def run_trial(
    scenario: Scenario,
    config: DeploymentConfig,
    trial: int,
    estimator: CostEstimator,
) -> TrialRecord:
    variant = config.variant
    state = initial_state(scenario, config.seed, trial)
    record = TrialRecord(trial=trial, variant=variant, seed=derive_seed(config.seed, "trial", trial), initial=state)
    tasks = task_sequence(scenario, config.seed, trial, config.sequence_length)
    try:
        if variant.prepares:
            schedule = AnnealingSchedule(iterations=config.prep_iterations)
            prepared = annealing.prepare(
                scenario, state, estimator, schedule, rng=stream(config.seed, "trial", trial, "anneal")
            )
            record.prepared = prepared
            record.preparation_cost = annealing.preparation_cost(state, prepared)
            state = prepared

        planner_estimator = estimator if variant.anticipates else ZeroEstimator()
        for i, task in enumerate(tasks):
            planner = PlannerConfig(
                n_candidates=config.n_candidates,
                estimator=planner_estimator,
                base_seed=derive_seed(config.seed, "trial", trial, "solver", i),
                solver=SolverConfig(),
            )
            started = time.perf_counter()
            plan: Plan = anticipatory_tamp(scenario, state, task, planner)
            elapsed = time.perf_counter() - started
            terminal = core.apply_plan(scenario, core.begin_episode(state), plan.actions)
            record.tasks.append(
                TaskRecord(
                    task_index=i,
                    label=task.label,
                    cost=plan.total_cost,
                    actions=[a.describe() for a in plan.actions],
                    initial=state,
                    terminal=terminal,
                    wallclock=elapsed if config.timing else None,
                )
            )
            state = terminal
        check_chain(record)
    except AntTampError as e:
        record.error = str(e)
        console.print(f"[red]trial {trial} ({variant}) aborted: {e}[/red]")
    return record


def build_estimator(
    spec: str,
    scenario: Scenario,
    oracle_samples: int = rules.ORACLE_SAMPLES_PER_TASK,
) -> CostEstimator:
    """Estimator for an ``--estimator`` value: zero, oracle or model:<checkpoint path>."""
    if spec == "zero":
        return ZeroEstimator()
    if spec == "oracle":
        return OracleEstimator(scenario, samples_per_task=oracle_samples)
    if spec.startswith("model:"):
        return LearnedEstimator(load_model(Path(spec.removeprefix("model:"))), scenario)
    raise ScenarioError(f"unknown estimator '{spec}'")


def run_deployment(
    config: DeploymentConfig,
    scenario: Scenario,
    estimator: CostEstimator | None = None,
) -> list[TrialRecord]:
    """Run ``config.n_trials`` trials (in parallel when ``workers`` > 1), returned in trial order."""
    if scenario.domain != config.domain:
        raise ScenarioError(f"config is for {config.domain}, scenario '{scenario.name}' is {scenario.domain}")
    estimator = estimator or ZeroEstimator()
    trials = range(config.n_trials)
    if config.workers <= 1:
        return [run_trial(scenario, config, t, estimator) for t in trials]
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        return list(pool.map(lambda t: run_trial(scenario, config, t, estimator), trials))
