"""Tests for the cabinet domain: class tasks, obstruction and the pick/place solver."""

from __future__ import annotations

import random
from dataclasses import replace

import pytest

from anticipatory_tamp.domain import cabinet, core, geometry
from anticipatory_tamp.errors import ScenarioError, UnsolvableInstanceError
from anticipatory_tamp.models.types import ActionKind, EntityClass, SolverConfig
from anticipatory_tamp.planning import solver
from tests.conftest import make_cabinet, make_namo, mug_behind_bottle, mug_behind_mug


def _unload_mugs(scenario):
    return cabinet.class_task(scenario, [EntityClass.MUG], load=False)


def test_single_class_distribution():
    dist = cabinet.cabinet_tasks(make_cabinet())
    labels = [t.label for t in dist.tasks]
    assert labels == [
        "load mugs",
        "unload mugs",
        "load bottles",
        "unload bottles",
        "load bowls",
        "unload bowls",
    ]
    assert dist.probabilities == pytest.approx([1 / 6] * 6)


def test_multi_class_distribution_covers_every_class_set():
    dist = cabinet.cabinet_tasks(make_cabinet(multi_class=True))
    assert len(dist.tasks) == 14
    everything = [t for t in dist.tasks if len(t.goal) == 9]
    assert {t.label for t in everything} == {"load bottles+bowls+mugs", "unload bottles+bowls+mugs"}


def test_cabinet_tasks_reject_namo():
    with pytest.raises(ScenarioError, match="not a cabinet"):
        cabinet.cabinet_tasks(make_namo())


def test_class_task_needs_members():
    with pytest.raises(ScenarioError, match="no objects"):
        cabinet.class_task(make_cabinet(), [EntityClass.BLOCK], load=True)


def test_obstructors_and_interchangeable_members():
    scenario = make_cabinet()
    state = mug_behind_mug(scenario)
    assert cabinet.grasp_obstructors(scenario, "mug0", state) == ["mug1"]
    same = cabinet.same_class(scenario, "mug0", state)
    assert same == {"mug1", "mug2"}
    assert cabinet.grasp_obstructors(scenario, "mug0", state, interchangeable=same) == []


# ---------------------------------------------------------------------------
# Solver
# ---------------------------------------------------------------------------


def test_load_mugs_shuttles_between_stations():
    scenario = make_cabinet()
    state = scenario.initial_state()
    task = cabinet.class_task(scenario, [EntityClass.MUG], load=True)
    plan = cabinet.solve_cabinet(scenario, state, task, random.Random(0))
    assert plan.count(ActionKind.PICK) == 3
    assert plan.count(ActionKind.PLACE) == 3
    assert plan.count(ActionKind.MOVE) == 6
    assert plan.total_cost == pytest.approx(136.5)
    assert plan.total_cost == pytest.approx(solver.lower_bound(scenario, state, task))
    assert core.task_satisfied(scenario, task, plan.terminal)
    assert geometry.is_valid_state(scenario, plan.terminal)


def test_obstructing_bottle_is_set_aside_in_the_cabinet():
    scenario = make_cabinet()
    state = mug_behind_bottle(scenario)
    for seed in range(5):
        plan = cabinet.solve_cabinet(scenario, state, _unload_mugs(scenario), random.Random(seed))
        picked = [a.entity for a in plan.actions if a.kind == ActionKind.PICK]
        assert picked == ["bottle0", "mug0"]
        assert plan.terminal.placement("bottle0") == "cabinet"
        assert plan.terminal.placement("mug0") == "table"
        assert plan.total_cost == pytest.approx(84.5)
        assert core.replay_cost(scenario, state, plan.actions) == pytest.approx(plan.total_cost)


def test_same_class_obstructor_is_delivered_first():
    scenario = make_cabinet()
    state = mug_behind_mug(scenario)
    for seed in range(5):
        plan = cabinet.solve_cabinet(scenario, state, _unload_mugs(scenario), random.Random(seed))
        assert plan.count(ActionKind.PICK) == 2
        assert plan.total_cost == pytest.approx(90.5)


def _relabel(state, mapping):
    sym = dict(state.symbolic.placements)
    poses = {}
    for old, new in mapping.items():
        sym[new] = state.placement(old)
        poses[new] = state.pose(old)
    return state.with_poses(poses).with_symbolic(placements=sym)


def test_same_class_instances_are_interchangeable():
    scenario = make_cabinet()
    state = mug_behind_mug(scenario)
    task = _unload_mugs(scenario)
    mapping = {"mug0": "mug1", "mug1": "mug2", "mug2": "mug0"}
    for seed in range(5):
        plan = cabinet.solve_cabinet(scenario, state, task, random.Random(seed))
        permuted = _relabel(state, mapping)
        actions = [replace(a, entity=mapping.get(a.entity, a.entity)) for a in plan.actions]
        terminal = core.apply_plan(scenario, permuted, actions)
        assert core.task_satisfied(scenario, task, terminal)
        assert geometry.is_valid_state(scenario, terminal)
        assert core.replay_cost(scenario, permuted, actions) == pytest.approx(plan.total_cost)


def test_satisfied_task_is_an_empty_plan():
    scenario = make_cabinet()
    task = _unload_mugs(scenario)
    plan = cabinet.solve_cabinet(scenario, scenario.initial_state(), task, random.Random(0))
    assert plan.actions == ()
    assert plan.total_cost == 0.0


def test_full_gripper_is_unsolvable():
    scenario = make_cabinet()
    state = scenario.initial_state().with_symbolic(holding="mug0")
    task = cabinet.class_task(scenario, [EntityClass.BOWL], load=True)
    with pytest.raises(UnsolvableInstanceError, match="gripper holds mug0"):
        cabinet.solve_cabinet(scenario, state, task, random.Random(0), SolverConfig())


def test_random_states_mix_regions():
    scenario = make_cabinet()
    seen = set()
    for seed in range(10):
        state = cabinet.random_state(scenario, random.Random(seed))
        assert geometry.is_valid_state(scenario, state)
        seen.update(state.symbolic.placements.values())
    assert seen == {"cabinet", "table"}
