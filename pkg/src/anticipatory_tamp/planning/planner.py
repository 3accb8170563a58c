"""Anticipatory plan selection: sample candidate plans, score each by cost plus estimated next-task cost."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from anticipatory_tamp.domain.core import CostEstimator, ZeroEstimator
from anticipatory_tamp.errors import CandidateError
from anticipatory_tamp.models.types import Plan, Scenario, SolverConfig, Task, WorldState
from anticipatory_tamp.planning import solver


class PlannerConfig(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    n_candidates: int = Field(100, ge=1)
    estimator: Any = Field(default_factory=ZeroEstimator)
    base_seed: int = 0
    workers: int = Field(1, ge=1)
    solver: SolverConfig = Field(default_factory=SolverConfig)


@dataclass(frozen=True)
class Candidate:
    plan: Plan
    cost: float
    estimate: float

    @property
    def total(self) -> float:
        return self.cost + self.estimate


@dataclass(frozen=True)
class Selection:
    candidates: list[Candidate]
    index: int

    @property
    def chosen(self) -> Candidate:
        return self.candidates[self.index]

    @property
    def plan(self) -> Plan:
        return self.chosen.plan


def state_key(state: WorldState) -> tuple:
    """Exact content key of a state, for reusing estimates of identical terminals."""
    sym = state.symbolic
    return (
        tuple(sorted(sym.placements.items())),
        sym.holding,
        tuple(sorted(sym.reached)),
        tuple((e, p.x, p.y) for e, p in sorted(state.poses.items())),
    )


def select(candidates: list[Candidate]) -> int:
    """Index of the minimum total; later candidates win ties."""
    if not candidates:
        raise ValueError("no candidates to select from")
    best = 0
    for i, c in enumerate(candidates):
        if c.total <= candidates[best].total:
            best = i
    return best


def score_candidates(plans: list[tuple[Plan, float]], estimator: CostEstimator) -> list[Candidate]:
    cache: dict[tuple, float] = {}
    scored = []
    for plan, cost in plans:
        key = state_key(plan.terminal)
        if key not in cache:
            cache[key] = float(estimator.estimate(plan.terminal))
        scored.append(Candidate(plan, cost, cache[key]))
    return scored


def anticipatory_selection(
    scenario: Scenario,
    s0: WorldState,
    task: Task,
    config: PlannerConfig | None = None,
) -> Selection:
    config = config or PlannerConfig()
    if not isinstance(config.estimator, CostEstimator):
        raise TypeError(f"estimator {config.estimator!r} has no estimate(state) method")
    plans = solver.sample_goal_states(
        scenario, s0, task, config.n_candidates, config.base_seed, config.solver, workers=config.workers
    )
    candidates = score_candidates(plans, config.estimator)
    return Selection(candidates, select(candidates))


def anticipatory_tamp(
    scenario: Scenario,
    s0: WorldState,
    task: Task,
    config: PlannerConfig | None = None,
) -> Plan:
    """Plan for ``task`` whose terminal state leaves the cheapest expected next task.

    With a ZeroEstimator this is the myopic planner: the cheapest of the
    sampled candidates. Candidate failures surface as CandidateError.
    """
    try:
        return anticipatory_selection(scenario, s0, task, config).plan
    except CandidateError as e:
        raise e.cause from e
