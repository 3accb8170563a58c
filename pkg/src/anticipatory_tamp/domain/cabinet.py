"""Cabinet loading: move every object of some semantic classes between the table and a front-access cabinet."""

from __future__ import annotations

import itertools
import random
from collections.abc import Collection

from anticipatory_tamp.domain import core, geometry, rules
from anticipatory_tamp.errors import RefinementFailure, ScenarioError, UnsolvableInstanceError
from anticipatory_tamp.models.types import (
    ActionKind,
    Domain,
    EntityClass,
    Fluent,
    GroundAction,
    Plan,
    Pose2,
    Predicate,
    Scenario,
    SolverConfig,
    Task,
    TaskDistribution,
    WorldState,
)

CABINET = "cabinet"
TABLE = "table"

# ---------------------------------------------------------------------------
# Tasks
# ---------------------------------------------------------------------------


def class_task(scenario: Scenario, classes: Collection[EntityClass], *, load: bool) -> Task:
    region = CABINET if load else TABLE
    members = sorted(e for c in classes for e in scenario.members(c))
    if not members:
        raise ScenarioError(f"no objects of class {', '.join(sorted(classes))}")
    names = "+".join(f"{c}s" for c in sorted(classes))
    return Task(
        goal=frozenset(Fluent(Predicate.IN, (e, region)) for e in members),
        label=f"{'load' if load else 'unload'} {names}",
    )


def cabinet_tasks(scenario: Scenario) -> TaskDistribution:
    """Uniform over load/unload of each class (or each nonempty class set with ``multi_class``)."""
    if scenario.domain != Domain.CABINET:
        raise ScenarioError(f"scenario '{scenario.name}' is not a cabinet scenario")
    classes = scenario.semantic_classes
    if scenario.multi_class:
        class_sets = [c for n in range(1, len(classes) + 1) for c in itertools.combinations(classes, n)]
    else:
        class_sets = [(c,) for c in classes]
    tasks = [class_task(scenario, cs, load=load) for cs in class_sets for load in (True, False)]
    return TaskDistribution.uniform(tasks)


def random_state(scenario: Scenario, rng: random.Random) -> WorldState:
    placements = {e: rng.choice((CABINET, TABLE)) for e in scenario.movable_ids}
    return geometry.place_randomly(scenario, placements, rng)


# ---------------------------------------------------------------------------
# Obstruction
# ---------------------------------------------------------------------------


def grasp_obstructors(
    scenario: Scenario,
    obj: str,
    state: WorldState,
    interchangeable: Collection[str] = (),
) -> list[str]:
    """Objects between the cabinet front and ``obj``, front-most first; ``interchangeable`` never obstruct."""
    corridor = geometry.grasp_corridor(scenario, CABINET, state.pose(obj), scenario.radius(obj))
    return geometry.blockers(scenario, corridor, state, ignore={obj, *interchangeable})


def same_class(scenario: Scenario, obj: str, state: WorldState) -> set[str]:
    cls = scenario.class_of(obj)
    return {e for e in state.movable if e != obj and scenario.class_of(e) == cls}


# ---------------------------------------------------------------------------
# Solver
# ---------------------------------------------------------------------------


class _Refinement:
    """One refinement of a load/unload skeleton: a target order plus sampled poses."""

    def __init__(
        self,
        scenario: Scenario,
        state: WorldState,
        destinations: dict[str, str],
        rng: random.Random,
        interchangeable: bool,
    ):
        self.scenario = scenario
        self.state = state
        self.destinations = destinations
        self.rng = rng
        self.interchangeable = interchangeable
        self.actions: list[GroundAction] = []
        self.pending: list[str] = []

    # -- primitive actions ---------------------------------------------------

    def _emit(self, action: GroundAction) -> None:
        self.state = core.apply_action(self.scenario, self.state, action, len(self.actions))
        self.actions.append(action)

    def _go_to(self, region: str) -> None:
        robot = self.state.pose(self.scenario.robot.id)
        station = self.scenario.station(region)
        if robot.distance(station) > rules.REPLAY_TOLERANCE:
            self._emit(GroundAction(ActionKind.MOVE, robot.distance(station), start=robot, pose=station))

    def _pick(self, obj: str) -> None:
        self._go_to(self.state.placement(obj))
        self._emit(GroundAction(ActionKind.PICK, rules.PICK_COST, entity=obj))

    def _place(self, obj: str, region: str, pose: Pose2) -> None:
        self._go_to(region)
        self._emit(GroundAction(ActionKind.PLACE, rules.PLACE_COST, entity=obj, region=region, pose=pose))

    def _sample(self, obj: str, region: str, keep_clear: Collection[str] = ()) -> Pose2:
        """Free, reachable pose for ``obj`` in ``region`` that stays off the grasp corridors of ``keep_clear``."""
        scenario, state, radius = self.scenario, self.state, self.scenario.radius(obj)
        protected = [
            geometry.grasp_corridor(scenario, region, state.pose(e), scenario.radius(e))
            for e in keep_clear
            if state.placement(e) == region
        ]
        protected = [c for c in protected if c is not None]

        def reachable(pose: Pose2) -> bool:
            corridor = geometry.grasp_corridor(scenario, region, pose, radius)
            if corridor is not None and geometry.blockers(scenario, corridor, state, ignore={obj}):
                return False
            return not any(geometry.blocks(c, pose, radius) for c in protected)

        return geometry.sample_free_pose(
            scenario,
            region,
            state,
            radius,
            self.rng,
            exclude={obj},
            margin=geometry.placement_margin(scenario, region),
            accept=reachable,
        )

    # -- skeleton steps ------------------------------------------------------

    def _obstructors(self, obj: str) -> list[str]:
        corridor = geometry.grasp_corridor(
            self.scenario, self.state.placement(obj), self.state.pose(obj), self.scenario.radius(obj)
        )
        if corridor is None:
            return []
        return geometry.blockers(self.scenario, corridor, self.state, ignore={obj})

    def _clear(self, obj: str, stack: tuple[str, ...]) -> None:
        """Make ``obj`` graspable by removing whatever sits between it and the front."""
        if obj in stack:
            raise RefinementFailure(f"circular obstruction involving {obj}")
        while obstructors := self._obstructors(obj):
            first = obstructors[0]
            if self.interchangeable and first in self.pending:
                # Scheduled for removal anyway: deliver it now instead of setting it aside.
                self.pending.remove(first)
                self._deliver(first, (*stack, obj))
            else:
                self._set_aside(first, (*stack, obj))

    def _set_aside(self, obj: str, stack: tuple[str, ...]) -> None:
        # Stays in its own region: the robot is already at that station, so no extra travel.
        self._clear(obj, stack)
        region = self.state.placement(obj)
        self._pick(obj)
        pose = self._sample(obj, region, keep_clear=[*stack, *self.pending])
        self._place(obj, region, pose)

    def _deliver(self, obj: str, stack: tuple[str, ...] = ()) -> None:
        self._clear(obj, stack)
        self._pick(obj)
        destination = self.destinations[obj]
        self._place(obj, destination, self._sample(obj, destination))

    def run(self, order: list[str]) -> list[GroundAction]:
        self.pending = list(order)
        while self.pending:
            obj = self.pending.pop(0)
            if self.state.placement(obj) != self.destinations[obj]:
                self._deliver(obj)
        return self.actions


def solve_cabinet(
    scenario: Scenario,
    state: WorldState,
    task: Task,
    rng: random.Random,
    config: SolverConfig | None = None,
) -> Plan:
    config = config or SolverConfig()
    destinations: dict[str, str] = {}
    for fluent in task.goal:
        if fluent.predicate != Predicate.IN:
            raise ScenarioError(f"cabinet tasks only use in(...) goals, got {fluent}")
        obj, region = fluent.args
        scenario.region(region)
        destinations[obj] = region
    if state.symbolic.holding is not None:
        raise UnsolvableInstanceError(task.label, f"gripper holds {state.symbolic.holding}")

    targets = sorted(o for o, r in destinations.items() if state.placement(o) != r)
    if not targets:
        return core.make_plan(scenario, state, [])

    for _ in range(config.skeleton_retry_budget):
        order = list(targets)
        rng.shuffle(order)
        for _ in range(config.refinement_retry_budget):
            refinement = _Refinement(scenario, state, destinations, rng, config.interchangeable_obstruction)
            try:
                actions = refinement.run(order)
            except RefinementFailure:
                continue
            return core.make_plan(scenario, state, actions)
    raise UnsolvableInstanceError(task.label, "refinement budget exhausted")
