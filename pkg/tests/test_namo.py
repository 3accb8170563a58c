"""Tests for the NAMO domain: reach tasks and the moveclear solver."""

from __future__ import annotations

import random

import pytest

from anticipatory_tamp.domain import core, geometry, namo
from anticipatory_tamp.errors import RefinementFailure, ScenarioError, UnsolvableInstanceError
from anticipatory_tamp.models.types import ActionKind, Predicate, SolverConfig
from anticipatory_tamp.planning import solver
from tests.conftest import BLOCKED_LAYOUT, make_cabinet, make_namo


def test_namo_tasks_are_uniform_reach_tasks():
    scenario = make_namo(blocks=BLOCKED_LAYOUT)
    dist = namo.namo_tasks(scenario)
    assert [t.label for t in dist.tasks] == ["reach block0", "reach block1", "reach block2"]
    assert dist.probabilities == pytest.approx([1 / 3] * 3)
    for task in dist.tasks:
        assert {f.predicate for f in task.goal} == {Predicate.REACHED, Predicate.AT_HOME}


def test_namo_goal_rejects_unknown_target_and_domain():
    with pytest.raises(ScenarioError):
        namo.namo_goal(make_namo(), "block7")
    with pytest.raises(ScenarioError, match="not a namo"):
        namo.namo_goal(make_cabinet(), "mug0")


def test_unblocked_target_is_a_straight_round_trip():
    scenario = make_namo(blocks=BLOCKED_LAYOUT)
    state = scenario.initial_state()
    task = namo.namo_goal(scenario, "block2")
    plan = namo.solve_namo(scenario, state, task, random.Random(0))
    (action,) = plan.actions
    assert action.kind == ActionKind.MOVE_CLEAR
    assert action.relocations == ()
    assert plan.total_cost == pytest.approx(solver.lower_bound(scenario, state, task))
    assert core.task_satisfied(scenario, task, plan.terminal)


def test_blocked_target_relocates_the_blocker():
    scenario = make_namo(blocks=BLOCKED_LAYOUT)
    state = scenario.initial_state()
    task = namo.namo_goal(scenario, "block0")
    plan = namo.solve_namo(scenario, state, task, random.Random(3))
    (action,) = plan.actions
    assert [r.entity for r in action.relocations] == ["block1"]
    assert plan.total_cost >= 200.0 + solver.lower_bound(scenario, state, task)
    assert core.replay_cost(scenario, state, plan.actions) == pytest.approx(plan.total_cost, abs=1e-9)
    corridor = namo.target_corridor(scenario, plan.terminal, "block0")
    assert geometry.blockers(scenario, corridor, plan.terminal, ignore={"block0"}) == []
    assert geometry.is_valid_state(scenario, plan.terminal)
    assert plan.terminal.symbolic.reached == frozenset({"block0"})


def test_adding_a_blocker_never_means_fewer_relocations():
    layouts = [((8.5, 5.0), (2.0, 2.0))]
    for extra in ((6.1, 5.0), (7.3, 5.3), (2.0, 8.0)):
        layouts.append((*layouts[-1], extra))
    for seed in range(10):
        counts = []
        for blocks in layouts:
            scenario = make_namo(blocks=blocks)
            task = namo.namo_goal(scenario, "block0")
            plan = namo.solve_namo(scenario, scenario.initial_state(), task, random.Random(seed))
            (action,) = plan.actions
            counts.append(len(action.relocations))
        assert counts == sorted(counts) == [0, 1, 2, 2]


def test_same_seed_same_plan():
    scenario = make_namo(blocks=BLOCKED_LAYOUT)
    state = scenario.initial_state()
    task = namo.namo_goal(scenario, "block0")
    a = namo.solve_namo(scenario, state, task, random.Random(9))
    b = namo.solve_namo(scenario, state, task, random.Random(9))
    assert a.actions == b.actions


def test_satisfied_task_gives_empty_plan():
    scenario = make_namo()
    state = scenario.initial_state().with_symbolic(reached=frozenset({"block1"}))
    plan = namo.solve_namo(scenario, state, namo.namo_goal(scenario, "block1"), random.Random(0))
    assert plan.actions == ()
    assert plan.total_cost == 0.0


def test_unrelocatable_blocker_is_unsolvable(monkeypatch):
    calls = []

    def no_room(*args, **kwargs):
        calls.append(args[1])
        raise RefinementFailure("full")

    monkeypatch.setattr(geometry, "sample_free_pose", no_room)
    scenario = make_namo(blocks=BLOCKED_LAYOUT)
    config = SolverConfig(skeleton_retry_budget=2, refinement_retry_budget=3)
    task = namo.namo_goal(scenario, "block0")
    with pytest.raises(UnsolvableInstanceError, match="reach block0"):
        namo.solve_namo(scenario, scenario.initial_state(), task, random.Random(0), config)
    assert len(calls) == 6


def test_random_states_are_valid():
    scenario = make_namo(blocks=BLOCKED_LAYOUT)
    for seed in range(10):
        state = namo.random_state(scenario, random.Random(seed))
        assert geometry.is_valid_state(scenario, state)
        assert state.pose("robot") == scenario.home_pose
