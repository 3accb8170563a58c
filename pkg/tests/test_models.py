"""Tests for state, task and scenario models."""

from __future__ import annotations

import pytest
from pydantic import ValidationError

from anticipatory_tamp.errors import ScenarioError
from anticipatory_tamp.models.types import (
    AnnealingSchedule,
    Domain,
    Fluent,
    Pose2,
    Predicate,
    Scenario,
    Task,
    TaskDistribution,
    Variant,
)
from tests.conftest import make_cabinet, make_namo


def _task(*targets: str) -> Task:
    return Task(frozenset(Fluent(Predicate.REACHED, (t,)) for t in targets), "reach " + "+".join(targets))


# ---------------------------------------------------------------------------
# Tasks and distributions
# ---------------------------------------------------------------------------


def test_task_with_empty_goal_is_rejected():
    with pytest.raises(ScenarioError, match="empty goal"):
        Task(frozenset(), "nothing")


def test_uniform_distribution_sums_to_one():
    dist = TaskDistribution.uniform([_task("a"), _task("b"), _task("c")])
    assert dist.probabilities == pytest.approx([1 / 3] * 3)
    assert [t.label for t in dist.tasks] == ["reach a", "reach b", "reach c"]


def test_distribution_rejects_bad_probabilities():
    with pytest.raises(ScenarioError, match="sum to"):
        TaskDistribution(((_task("a"), 0.5), (_task("b"), 0.4)))
    with pytest.raises(ScenarioError, match="outside"):
        TaskDistribution(((_task("a"), 1.5), (_task("b"), -0.5)))


def test_distribution_rejects_duplicates_and_empty():
    with pytest.raises(ScenarioError, match="duplicate"):
        TaskDistribution(((_task("a"), 0.5), (_task("a"), 0.5)))
    with pytest.raises(ScenarioError, match="empty"):
        TaskDistribution.uniform([])


def test_mixture_merges_shared_tasks():
    a, b, c = _task("a"), _task("b"), _task("c")
    first = TaskDistribution.uniform([a, b])
    second = TaskDistribution.uniform([b, c])
    mixed = first.mixture(second, 0.25)
    probs = {t.label: p for t, p in mixed.entries}
    assert probs == pytest.approx({"reach a": 0.125, "reach b": 0.5, "reach c": 0.375})


def test_mixture_with_full_weight_drops_the_other():
    first = TaskDistribution.uniform([_task("a")])
    mixed = first.mixture(TaskDistribution.uniform([_task("b")]), 1.0)
    assert [t.label for t in mixed.tasks] == ["reach a"]


def test_fluent_str():
    assert str(Fluent(Predicate.IN, ("mug0", "cabinet"))) == "in(mug0, cabinet)"


# ---------------------------------------------------------------------------
# World state
# ---------------------------------------------------------------------------


def test_world_state_updates_are_copies():
    state = make_namo().initial_state()
    moved = state.with_pose("block0", Pose2(1.0, 1.0))
    assert state.pose("block0") == Pose2(2.0, 8.0)
    assert moved.pose("block0") == Pose2(1.0, 1.0)


def test_with_symbolic_keeps_holding_by_default():
    state = make_cabinet().initial_state().with_symbolic(holding="mug0")
    updated = state.with_symbolic(reached=frozenset({"x"}))
    assert updated.symbolic.holding == "mug0"
    assert updated.with_symbolic(holding=None).symbolic.gripper_empty


def test_unknown_entity_lookup_raises():
    state = make_namo().initial_state()
    with pytest.raises(ScenarioError):
        state.pose("ghost")
    with pytest.raises(ScenarioError):
        state.placement("robot")


def test_in_region_and_movable_are_sorted():
    state = make_cabinet().initial_state()
    assert state.movable[:3] == ["bottle0", "bottle1", "bottle2"]
    assert state.in_region("cabinet") == []
    assert len(state.in_region("table")) == 9


# ---------------------------------------------------------------------------
# Scenario schema
# ---------------------------------------------------------------------------


def test_scenario_accepts_class_alias():
    raw = make_cabinet().model_dump(mode="json", by_alias=True)
    assert raw["entities"][0]["class"] == "mug"
    assert Scenario.model_validate(raw).class_of("mug0") == "mug"


def test_scenario_rejects_duplicate_ids():
    raw = make_namo().model_dump(mode="json", by_alias=True)
    raw["entities"][1]["id"] = raw["entities"][0]["id"]
    with pytest.raises(ValidationError, match="unique"):
        Scenario.model_validate(raw)


def test_scenario_rejects_unknown_region():
    raw = make_namo().model_dump(mode="json", by_alias=True)
    raw["entities"][0]["region"] = "attic"
    with pytest.raises(ValidationError, match="unknown region"):
        Scenario.model_validate(raw)


def test_namo_scenario_requires_home():
    raw = make_namo().model_dump(mode="json", by_alias=True)
    raw.pop("home")
    with pytest.raises(ValidationError, match="home"):
        Scenario.model_validate(raw)


def test_scenario_rejects_other_schema_version():
    raw = make_namo().model_dump(mode="json", by_alias=True)
    raw["schema_version"] = 2
    with pytest.raises(ValidationError, match="schema_version"):
        Scenario.model_validate(raw)


def test_scenario_lookups():
    scenario = make_cabinet()
    assert scenario.domain == Domain.CABINET
    assert scenario.semantic_classes == ["mug", "bottle", "bowl"]
    assert scenario.members("bowl") == ["bowl0", "bowl1", "bowl2"]
    assert scenario.station("table") == Pose2(4.5, 2.0)
    with pytest.raises(ScenarioError, match="station"):
        scenario.station("floor")
    with pytest.raises(ScenarioError, match="home"):
        _ = scenario.home_pose


# ---------------------------------------------------------------------------
# Configs and variants
# ---------------------------------------------------------------------------


def test_annealing_temperature_is_geometric():
    schedule = AnnealingSchedule()
    assert schedule.temperature(0) == 1000.0
    assert schedule.temperature(3) == 1000.0 * 0.95**3


def test_annealing_schedule_rejects_non_cooling_rate():
    with pytest.raises(ValidationError):
        AnnealingSchedule(cooling_rate=1.0)


def test_variant_flags():
    assert [v for v in Variant if v.prepares] == [Variant.PREP_MYOPIC, Variant.PREP_ANTTAMP]
    assert [v for v in Variant if v.anticipates] == [Variant.ANTTAMP, Variant.PREP_ANTTAMP]
