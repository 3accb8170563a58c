"""Navigation among movable obstacles: reach a target block from home and return.

A single moveclear operator covers the whole task: blocks on the straight
home->target corridor are carried, one at a time, to sampled free poses off
that corridor, then the robot drives to the target and back home.
"""

from __future__ import annotations

import random
from dataclasses import replace

from anticipatory_tamp.domain import core, geometry
from anticipatory_tamp.errors import RefinementFailure, ScenarioError, UnsolvableInstanceError
from anticipatory_tamp.models.types import (
    ActionKind,
    Domain,
    Fluent,
    GroundAction,
    Plan,
    Predicate,
    Relocation,
    Scenario,
    SolverConfig,
    Task,
    TaskDistribution,
    WorldState,
)


def namo_goal(scenario: Scenario, target: str) -> Task:
    if scenario.domain != Domain.NAMO:
        raise ScenarioError(f"scenario '{scenario.name}' is not a namo scenario")
    if target not in scenario.movable_ids:
        raise ScenarioError(f"unknown target '{target}'")
    return Task(
        goal=frozenset({Fluent(Predicate.REACHED, (target,)), Fluent(Predicate.AT_HOME, (scenario.robot.id,))}),
        label=f"reach {target}",
    )


def namo_tasks(scenario: Scenario) -> TaskDistribution:
    """Uniform over reaching each movable block."""
    return TaskDistribution.uniform(namo_goal(scenario, e) for e in scenario.movable_ids)


def namo_target(task: Task) -> str:
    for fluent in task.goal:
        if fluent.predicate == Predicate.REACHED:
            return fluent.args[0]
    raise ScenarioError(f"task '{task.label}' is not a reach task")


def random_state(scenario: Scenario, rng: random.Random) -> WorldState:
    return geometry.place_randomly(scenario, {e.id: e.region for e in scenario.entities}, rng)


def target_corridor(scenario: Scenario, state: WorldState, target: str) -> geometry.Corridor:
    home = scenario.home_pose
    r_robot, r_target = scenario.robot.radius, scenario.radius(target)
    standoff = geometry.standoff_pose(home, state.pose(target), r_robot, r_target)
    return geometry.navigation_corridor(home, standoff, r_robot, r_target)


def _relocate(
    scenario: Scenario,
    state: WorldState,
    order: list[str],
    corridor: geometry.Corridor,
    rng: random.Random,
) -> tuple[Relocation, ...]:
    relocations = []
    for block in order:
        radius = scenario.radius(block)
        pose = geometry.sample_free_pose(
            scenario,
            state.placement(block),
            state,
            radius,
            rng,
            exclude={block},
            accept=geometry.clear_of([corridor], radius),
        )
        relocations.append(Relocation(block, pose))
        state = state.with_pose(block, pose)
    return tuple(relocations)


def solve_namo(
    scenario: Scenario,
    state: WorldState,
    task: Task,
    rng: random.Random,
    config: SolverConfig | None = None,
) -> Plan:
    config = config or SolverConfig()
    target = namo_target(task)
    if core.task_satisfied(scenario, task, state):
        return core.make_plan(scenario, state, [])

    corridor = target_corridor(scenario, state, target)
    in_the_way = geometry.blockers(scenario, corridor, state, ignore={target})
    standoff = corridor.spine.b

    for attempt in range(config.skeleton_retry_budget):
        # Later skeletons clear the blockers in a shuffled order.
        order = list(in_the_way)
        if attempt:
            rng.shuffle(order)
        for _ in range(config.refinement_retry_budget):
            try:
                relocations = _relocate(scenario, state, order, corridor, rng)
            except RefinementFailure:
                continue
            action = GroundAction(
                kind=ActionKind.MOVE_CLEAR,
                cost=0.0,
                entity=target,
                start=scenario.home_pose,
                pose=standoff,
                relocations=relocations,
            )
            action = replace(action, cost=core.moveclear_cost(scenario, state, action))
            return core.make_plan(scenario, state, [action])
    raise UnsolvableInstanceError(task.label, f"{len(in_the_way)} blockers could not be relocated")
