"""Domain-independent semantics: fluents, action transitions, plan replay and cost accounting."""

from __future__ import annotations

import math
from collections.abc import Sequence
from typing import Protocol, runtime_checkable

from anticipatory_tamp.domain import geometry, rules
from anticipatory_tamp.errors import InvalidPlanError, ScenarioError
from anticipatory_tamp.models.types import (
    ActionKind,
    Fluent,
    GroundAction,
    Plan,
    Predicate,
    Scenario,
    Task,
    WorldState,
)

# ---------------------------------------------------------------------------
# Fluents and tasks
# ---------------------------------------------------------------------------


def evaluate_fluent(scenario: Scenario, fluent: Fluent, state: WorldState) -> bool:
    match fluent.predicate:
        case Predicate.IN:
            entity, region = fluent.args
            scenario.region(region)
            return state.placement(entity) == region and state.symbolic.holding != entity
        case Predicate.REACHED:
            (entity,) = fluent.args
            scenario.entity(entity)
            return entity in state.symbolic.reached
        case Predicate.AT_HOME:
            (robot,) = fluent.args
            if robot != scenario.robot.id:
                raise ScenarioError(f"athome expects the robot id, got '{robot}'")
            return state.pose(robot).distance(scenario.home_pose) <= rules.REPLAY_TOLERANCE
    raise ScenarioError(f"unsupported predicate '{fluent.predicate}'")


def task_satisfied(scenario: Scenario, task: Task, state: WorldState) -> bool:
    return all(evaluate_fluent(scenario, f, state) for f in sorted(task.goal))


def begin_episode(state: WorldState) -> WorldState:
    """Clear per-task markers (reached targets) before a new task is solved."""
    if not state.symbolic.reached:
        return state
    return state.with_symbolic(reached=frozenset())


def same_environment(a: WorldState, b: WorldState, tol: float = rules.REPLAY_TOLERANCE) -> bool:
    """Persistent content equality: placements, gripper and poses (episode markers ignored)."""
    if dict(a.symbolic.placements) != dict(b.symbolic.placements) or a.symbolic.holding != b.symbolic.holding:
        return False
    if a.poses.keys() != b.poses.keys():
        return False
    return all(a.poses[k].distance(b.poses[k]) <= tol for k in a.poses)


# ---------------------------------------------------------------------------
# Transitions
# ---------------------------------------------------------------------------


def _require_station(scenario: Scenario, state: WorldState, region_id: str) -> str | None:
    if region_id not in scenario.stations:
        return None
    robot = state.pose(scenario.robot.id)
    if robot.distance(scenario.station(region_id)) > rules.REPLAY_TOLERANCE:
        return f"robot is not at the '{region_id}' station"
    return None


def _apply_move(scenario: Scenario, state: WorldState, action: GroundAction) -> WorldState | str:
    robot = scenario.robot.id
    if action.start is not None and state.pose(robot).distance(action.start) > rules.REPLAY_TOLERANCE:
        return "move does not start at the robot's pose"
    return state.with_pose(robot, action.pose)


def _apply_pick(scenario: Scenario, state: WorldState, action: GroundAction) -> WorldState | str:
    entity = action.entity
    if not state.symbolic.gripper_empty:
        return f"gripper already holds {state.symbolic.holding}"
    region = state.placement(entity)
    if problem := _require_station(scenario, state, region):
        return problem
    corridor = geometry.grasp_corridor(scenario, region, state.pose(entity), scenario.radius(entity))
    if corridor is not None:
        obstructing = geometry.blockers(scenario, corridor, state, ignore={entity})
        if obstructing:
            return f"grasp of {entity} obstructed by {', '.join(obstructing)}"
    return state.with_symbolic(holding=entity)


def _apply_place(scenario: Scenario, state: WorldState, action: GroundAction) -> WorldState | str:
    entity, region, pose = action.entity, action.region, action.pose
    if state.symbolic.holding != entity:
        return f"place of {entity} while not holding it"
    if problem := _require_station(scenario, state, region):
        return problem
    radius = scenario.radius(entity)
    if not geometry.region_contains(scenario, region, pose, radius):
        return f"place pose of {entity} outside '{region}'"
    if not geometry.is_free(scenario, state, pose, radius, exclude={entity}):
        return f"place pose of {entity} overlaps another object"
    corridor = geometry.grasp_corridor(scenario, region, pose, radius)
    if corridor is not None:
        obstructing = geometry.blockers(scenario, corridor, state, ignore={entity})
        if obstructing:
            return f"insertion of {entity} obstructed by {', '.join(obstructing)}"
    placements = dict(state.symbolic.placements)
    placements[entity] = region
    return state.with_pose(entity, pose).with_symbolic(placements=placements, holding=None)


def _apply_move_clear(scenario: Scenario, state: WorldState, action: GroundAction) -> WorldState | str:
    target = action.entity
    robot, home = scenario.robot.id, scenario.home_pose
    if not state.symbolic.gripper_empty:
        return "moveclear needs an empty gripper"
    if state.pose(robot).distance(home) > rules.REPLAY_TOLERANCE:
        return "moveclear must start at home"
    for reloc in action.relocations:
        if reloc.entity == target:
            return f"moveclear cannot relocate its own target {target}"
        radius = scenario.radius(reloc.entity)
        if not geometry.region_contains(scenario, state.placement(reloc.entity), reloc.pose, radius):
            return f"relocation of {reloc.entity} leaves its region"
        if not geometry.is_free(scenario, state, reloc.pose, radius, exclude={reloc.entity}):
            return f"relocation of {reloc.entity} overlaps another object"
        state = state.with_pose(reloc.entity, reloc.pose)
    r_robot, r_target = scenario.robot.radius, scenario.radius(target)
    standoff = geometry.standoff_pose(home, state.pose(target), r_robot, r_target)
    if action.pose is not None and standoff.distance(action.pose) > rules.REPLAY_TOLERANCE:
        return "moveclear standoff does not match the target"
    corridor = geometry.navigation_corridor(home, standoff, r_robot, r_target)
    remaining = geometry.blockers(scenario, corridor, state, ignore={target})
    if remaining:
        return f"path to {target} still blocked by {', '.join(remaining)}"
    return state.with_symbolic(reached=state.symbolic.reached | {target})


_TRANSITIONS = {
    ActionKind.MOVE: _apply_move,
    ActionKind.PICK: _apply_pick,
    ActionKind.PLACE: _apply_place,
    ActionKind.MOVE_CLEAR: _apply_move_clear,
}


def apply_action(scenario: Scenario, state: WorldState, action: GroundAction, index: int = 0) -> WorldState:
    try:
        result = _TRANSITIONS[action.kind](scenario, state, action)
    except ScenarioError as e:
        raise InvalidPlanError(index, str(e)) from e
    if isinstance(result, str):
        raise InvalidPlanError(index, result)
    return result


def apply_plan(scenario: Scenario, s0: WorldState, actions: Sequence[GroundAction]) -> WorldState:
    """Replay actions from ``s0``; every intermediate state is validated in debug runs."""
    state = s0
    for i, action in enumerate(actions):
        state = apply_action(scenario, state, action, i)
        if __debug__:
            problems = geometry.state_violations(scenario, state)
            if problems:
                raise InvalidPlanError(i, "; ".join(problems))
    return state


# ---------------------------------------------------------------------------
# Costs
# ---------------------------------------------------------------------------


def moveclear_cost(scenario: Scenario, state: WorldState, action: GroundAction) -> float:
    """200 per block moved plus the robot's total base travel, carrying each block home->block->drop->home."""
    home = scenario.home_pose
    cost = 0.0
    for reloc in action.relocations:
        origin = state.pose(reloc.entity)
        cost += rules.BLOCK_MOVED_COST
        cost += home.distance(origin) + origin.distance(reloc.pose) + reloc.pose.distance(home)
        state = state.with_pose(reloc.entity, reloc.pose)
    standoff = geometry.standoff_pose(
        home, state.pose(action.entity), scenario.robot.radius, scenario.radius(action.entity)
    )
    return cost + 2.0 * home.distance(standoff)


def action_cost(scenario: Scenario, state: WorldState, action: GroundAction) -> float:
    """Recompute an action's cost from the state it is applied in."""
    match action.kind:
        case ActionKind.PICK:
            return rules.PICK_COST
        case ActionKind.PLACE:
            return rules.PLACE_COST
        case ActionKind.MOVE:
            start = action.start if action.start is not None else state.pose(scenario.robot.id)
            return start.distance(action.pose)
        case ActionKind.MOVE_CLEAR:
            return moveclear_cost(scenario, state, action)
    raise ScenarioError(f"no cost model for '{action.kind}'")


def plan_total_cost(actions: Sequence[GroundAction]) -> float:
    total = 0.0
    for i, action in enumerate(actions):
        if action.cost < 0.0 or not math.isfinite(action.cost):
            raise InvalidPlanError(i, f"invalid action cost {action.cost}")
        total += action.cost
    return total


def replay_cost(scenario: Scenario, s0: WorldState, actions: Sequence[GroundAction]) -> float:
    """Cost of ``actions`` recomputed from geometry while replaying them."""
    state, total = s0, 0.0
    for i, action in enumerate(actions):
        total += action_cost(scenario, state, action)
        state = apply_action(scenario, state, action, i)
    return total


def make_plan(scenario: Scenario, initial: WorldState, actions: Sequence[GroundAction]) -> Plan:
    actions = tuple(actions)
    return Plan(
        actions=actions,
        initial=initial,
        terminal=apply_plan(scenario, initial, actions),
        total_cost=plan_total_cost(actions),
    )


# ---------------------------------------------------------------------------
# Estimator interface
# ---------------------------------------------------------------------------


@runtime_checkable
class CostEstimator(Protocol):
    """Estimated expected cost of the next task from a state. Must be thread-safe after construction."""

    def estimate(self, state: WorldState) -> float: ...


class ZeroEstimator:
    """Myopic planning: no anticipated future cost."""

    def estimate(self, state: WorldState) -> float:
        return 0.0
