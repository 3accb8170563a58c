"""Preparation: simulated annealing over object poses before any task arrives.

The symbolic state stays fixed; only continuous poses move. Each iteration
perturbs one object, scores the result with a cost estimator and accepts it
when it is cheaper or when a random draw falls under exp(-delta / T).
The temperature cools geometrically and the best accepted state is returned.
"""

from __future__ import annotations

import math
import random
from collections.abc import Callable
from dataclasses import dataclass, field

from anticipatory_tamp.domain import geometry, rules
from anticipatory_tamp.domain.core import CostEstimator
from anticipatory_tamp.errors import RefinementFailure
from anticipatory_tamp.models.types import AnnealingSchedule, Pose2, Scenario, WorldState

NeighborFn = Callable[[WorldState, random.Random], WorldState]


@dataclass
class AnnealingTrace:
    best: WorldState
    best_value: float
    initial_value: float
    temperatures: list[float] = field(default_factory=list)
    proposals: list[float] = field(default_factory=list)
    accepted: list[bool] = field(default_factory=list)

    @property
    def acceptance_rate(self) -> float:
        return sum(self.accepted) / len(self.accepted) if self.accepted else 0.0


def get_neighbor(
    scenario: Scenario,
    state: WorldState,
    rng: random.Random,
    fraction: float = rules.PERTURBATION_FRACTION,
    max_tries: int = rules.NEIGHBOR_MAX_TRIES,
    jump_probability: float = 0.0,
) -> WorldState:
    """Move one random object uniformly within a disc, staying in its region and off every other disc.

    With probability ``jump_probability`` the object is instead resampled anywhere
    in its region, which lets an object boxed in by its neighbours escape.
    Returns ``state`` itself when no valid move turns up within ``max_tries``.
    """
    movable = [e for e in state.movable if e != state.symbolic.holding]
    if not movable:
        return state
    entity = rng.choice(movable)
    region = state.placement(entity)
    radius = scenario.radius(entity)
    margin = geometry.placement_margin(scenario, region)
    if jump_probability > 0.0 and rng.random() < jump_probability:
        try:
            pose = geometry.sample_free_pose(
                scenario, region, state, radius, rng, max_tries, exclude={entity}, margin=margin
            )
        except RefinementFailure:
            return state
        return state.with_pose(entity, pose)

    reach = fraction * scenario.bounds.min_dimension
    origin = state.pose(entity)
    for _ in range(max_tries):
        r = reach * math.sqrt(rng.random())
        theta = rng.uniform(0.0, 2.0 * math.pi)
        pose = Pose2(origin.x + r * math.cos(theta), origin.y + r * math.sin(theta))
        if not geometry.region_contains(scenario, region, pose, radius):
            continue
        if not geometry.is_free(scenario, state, pose, radius, exclude={entity}, margin=margin):
            continue
        return state.with_pose(entity, pose)
    return state


def accept(delta: float, temperature: float, rng: random.Random) -> bool:
    if delta < 0.0:
        return True
    if temperature <= 0.0:
        return False
    return rng.random() < math.exp(-delta / temperature)


def prepare_with_trace(
    scenario: Scenario,
    s0: WorldState,
    estimator: CostEstimator,
    schedule: AnnealingSchedule | None = None,
    rng: random.Random | None = None,
    neighbor: NeighborFn | None = None,
) -> AnnealingTrace:
    schedule = schedule or AnnealingSchedule()
    rng = rng if rng is not None else random.Random(0)
    if neighbor is None:

        def neighbor(state: WorldState, r: random.Random) -> WorldState:
            return get_neighbor(
                scenario, state, r, schedule.perturbation_fraction, jump_probability=schedule.jump_probability
            )

    initial = float(estimator.estimate(s0))
    trace = AnnealingTrace(best=s0, best_value=initial, initial_value=initial)
    current, current_value = s0, initial
    for i in range(schedule.iterations):
        temperature = schedule.temperature(i)
        proposal = neighbor(current, rng)
        value = float(estimator.estimate(proposal))
        ok = accept(value - current_value, temperature, rng)
        trace.temperatures.append(temperature)
        trace.proposals.append(value)
        trace.accepted.append(ok)
        if ok:
            current, current_value = proposal, value
            if current_value < trace.best_value:
                trace.best, trace.best_value = current, current_value
    return trace


def prepare(
    scenario: Scenario,
    s0: WorldState,
    estimator: CostEstimator,
    schedule: AnnealingSchedule | None = None,
    rng: random.Random | None = None,
    neighbor: NeighborFn | None = None,
) -> WorldState:
    """Lowest-estimate state found by annealing from ``s0``; never worse than ``s0``."""
    return prepare_with_trace(scenario, s0, estimator, schedule, rng, neighbor).best


def preparation_cost(before: WorldState, after: WorldState) -> float:
    """Total straight-line displacement of the objects moved while preparing."""
    return sum(before.pose(e).distance(after.pose(e)) for e in before.movable)
