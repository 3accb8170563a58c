"""Randomized TAMP facade: one satisfying plan per call, a fresh goal-state sample per seed."""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor

from anticipatory_tamp.domain import cabinet, core, geometry, namo, rules
from anticipatory_tamp.errors import AntTampError, CandidateError, ScenarioError
from anticipatory_tamp.models.types import (
    Domain,
    Plan,
    Scenario,
    SolverConfig,
    Task,
    TaskDistribution,
    WorldState,
)

_SOLVERS = {
    Domain.NAMO: namo.solve_namo,
    Domain.CABINET: cabinet.solve_cabinet,
}

_DEFAULT_TASKS = {
    Domain.NAMO: namo.namo_tasks,
    Domain.CABINET: cabinet.cabinet_tasks,
}

_RANDOM_STATES = {
    Domain.NAMO: namo.random_state,
    Domain.CABINET: cabinet.random_state,
}


def task_distribution(scenario: Scenario) -> TaskDistribution:
    """The scenario's explicit task list if it has one, else the domain's default distribution."""
    if not scenario.tasks:
        return _DEFAULT_TASKS[scenario.domain](scenario)
    entries = []
    for spec in scenario.tasks:
        task = Task(goal=frozenset(f.to_fluent() for f in spec.goal), label=spec.label)
        for fluent in task.goal:
            for arg in fluent.args:
                if arg not in scenario.movable_ids and arg != scenario.robot.id:
                    scenario.region(arg)
        entries.append((task, spec.probability))
    return TaskDistribution(tuple(entries))


def random_state(scenario: Scenario, rng: random.Random) -> WorldState:
    return _RANDOM_STATES[scenario.domain](scenario, rng)


def lower_bound(scenario: Scenario, state: WorldState, task: Task) -> float:
    """Analytic floor under every plan the solver can return for ``task`` from ``state``.

    namo: out-and-back travel to the standoff. cabinet: one pick and place per
    misplaced object, plus the station shuttling forced when every target
    moves the same way.
    """
    state = core.begin_episode(state)
    if core.task_satisfied(scenario, task, state):
        return 0.0
    if scenario.domain == Domain.NAMO:
        corridor = namo.target_corridor(scenario, state, namo.namo_target(task))
        return 2.0 * corridor.spine.length
    misplaced = [f for f in sorted(task.goal) if not core.evaluate_fluent(scenario, f, state)]
    bound = len(misplaced) * (rules.PICK_COST + rules.PLACE_COST)
    sources = {state.placement(f.args[0]) for f in misplaced}
    destinations = {f.args[1] for f in misplaced}
    if len(sources) == 1 and len(destinations) == 1 and sources != destinations:
        (src,), (dst,) = sources, destinations
        if src in scenario.stations and dst in scenario.stations:
            src_station, dst_station = scenario.station(src), scenario.station(dst)
            bound += state.pose(scenario.robot.id).distance(src_station)
            bound += src_station.distance(dst_station) * (2 * len(misplaced) - 1)
    return bound


def tamp_solve(
    scenario: Scenario,
    state: WorldState,
    task: Task,
    config: SolverConfig | None = None,
) -> tuple[Plan, float]:
    """Solve ``task`` from ``state`` (new episode); the returned cost is the plan's total cost."""
    config = config or SolverConfig()
    try:
        solve = _SOLVERS[scenario.domain]
    except KeyError:
        raise ScenarioError(f"no solver for domain '{scenario.domain}'") from None
    rng = random.Random(config.rng_seed)
    plan = solve(scenario, core.begin_episode(state), task, rng, config)
    return plan, plan.total_cost


def sample_goal_states(
    scenario: Scenario,
    state: WorldState,
    task: Task,
    n: int,
    base_seed: int,
    config: SolverConfig | None = None,
    workers: int = 1,
) -> list[tuple[Plan, float]]:
    """``n`` independent solves seeded ``base_seed .. base_seed + n - 1``, returned in seed order."""
    if n < 1:
        raise ValueError(f"need at least one sample, got {n}")
    config = config or SolverConfig()
    configs = [config.model_copy(update={"rng_seed": base_seed + i}) for i in range(n)]

    def _one(i: int) -> tuple[Plan, float]:
        try:
            return tamp_solve(scenario, state, task, configs[i])
        except AntTampError as e:
            raise CandidateError(i, e) from e

    if workers <= 1 or n == 1:
        return [_one(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_one, range(n)))


def terminal_signature(plan: Plan) -> tuple:
    """Continuous terminal state on a 1e-3 grid, for counting distinct sampled goal states."""
    poses = plan.terminal.poses
    return tuple((e, poses[e].grid_key()) for e in sorted(poses))


def validate_state(scenario: Scenario, state: WorldState) -> None:
    problems = geometry.state_violations(scenario, state)
    if problems:
        raise ScenarioError("invalid state: " + "; ".join(problems))
