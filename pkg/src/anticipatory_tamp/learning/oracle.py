"""Exact anticipatory planning cost: solve every task in the distribution and take the expectation."""

from __future__ import annotations

from anticipatory_tamp.domain import rules
from anticipatory_tamp.errors import AntTampError, UnsolvableInstanceError
from anticipatory_tamp.models.types import Scenario, SolverConfig, Task, TaskDistribution, WorldState
from anticipatory_tamp.planning import solver

# Relative slack when comparing a sampled cost against the analytic floor.
_FLOOR_SLACK = 1e-12


def task_cost(
    scenario: Scenario,
    state: WorldState,
    task: Task,
    samples: int = rules.ORACLE_SAMPLES_PER_TASK,
    base_seed: int = rules.ORACLE_SEED,
    config: SolverConfig | None = None,
) -> float:
    """Cheapest of ``samples`` seeded solves of ``task`` from ``state``.

    Sampling stops early once a plan reaches the analytic lower bound, since no
    later seed can beat it.
    """
    if samples < 1:
        raise ValueError(f"need at least one solver sample per task, got {samples}")
    config = config or SolverConfig()
    floor = solver.lower_bound(scenario, state, task)
    best = float("inf")
    for i in range(samples):
        try:
            _, cost = solver.tamp_solve(scenario, state, task, config.model_copy(update={"rng_seed": base_seed + i}))
        except UnsolvableInstanceError:
            raise
        except AntTampError as e:
            raise UnsolvableInstanceError(task.label, str(e)) from e
        best = min(best, cost)
        if best <= floor * (1.0 + _FLOOR_SLACK):
            break
    return best


def oracle_vap(
    scenario: Scenario,
    state: WorldState,
    dist: TaskDistribution,
    config: SolverConfig | None = None,
    samples_per_task: int = rules.ORACLE_SAMPLES_PER_TASK,
    base_seed: int = rules.ORACLE_SEED,
) -> float:
    """Sum over tasks of P(task) times the task's best sampled cost from ``state``."""
    total = 0.0
    for task, p in dist.entries:
        if p == 0.0:
            continue
        total += p * task_cost(scenario, state, task, samples_per_task, base_seed, config)
    return total


class OracleEstimator:
    """CostEstimator backed by brute-force solving; exact but slow."""

    def __init__(
        self,
        scenario: Scenario,
        distribution: TaskDistribution | None = None,
        samples_per_task: int = rules.ORACLE_SAMPLES_PER_TASK,
        base_seed: int = rules.ORACLE_SEED,
        config: SolverConfig | None = None,
    ):
        self.scenario = scenario
        self.distribution = distribution or solver.task_distribution(scenario)
        self.samples_per_task = samples_per_task
        self.base_seed = base_seed
        self.config = config or SolverConfig()

    def estimate(self, state: WorldState) -> float:
        return oracle_vap(
            self.scenario, state, self.distribution, self.config, self.samples_per_task, self.base_seed
        )
