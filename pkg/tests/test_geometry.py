"""Tests for disc/corridor geometry and free-pose sampling."""

from __future__ import annotations

import math
import random

import numpy as np
import pytest

from anticipatory_tamp.domain import geometry
from anticipatory_tamp.errors import RefinementFailure, ScenarioError
from anticipatory_tamp.models.types import (
    Bounds,
    Domain,
    EntityClass,
    EntitySpec,
    Pose2,
    PoseSpec,
    RegionSpec,
    Scenario,
)
from tests.conftest import BLOCKED_LAYOUT, make_cabinet, make_namo


def _box(radius: float) -> Scenario:
    """Unit-square container holding one centred disc."""
    return Scenario(
        domain=Domain.CABINET,
        name="box",
        bounds=Bounds(xmin=0.0, ymin=0.0, xmax=1.0, ymax=1.0),
        robot=EntitySpec(id="robot", cls=EntityClass.ROBOT, radius=0.1, pose=PoseSpec(x=0.0, y=0.0)),
        regions=[RegionSpec(id="box", xmin=0.0, ymin=0.0, xmax=1.0, ymax=1.0)],
        entities=[EntitySpec(id="a", cls=EntityClass.MUG, radius=radius, pose=PoseSpec(x=0.5, y=0.5), region="box")],
    )


# ---------------------------------------------------------------------------
# Segments and corridors
# ---------------------------------------------------------------------------


def test_segment_distance_clamps_to_endpoints():
    seg = geometry.Segment(Pose2(0.0, 0.0), Pose2(10.0, 0.0))
    assert seg.distance_to(Pose2(5.0, 3.0)) == pytest.approx(3.0)
    assert seg.distance_to(Pose2(-3.0, 4.0)) == pytest.approx(5.0)
    assert seg.closest_point(Pose2(12.0, 1.0)) == Pose2(10.0, 0.0)


def test_degenerate_segment_is_a_point():
    seg = geometry.Segment(Pose2(1.0, 1.0), Pose2(1.0, 1.0))
    assert seg.distance_to(Pose2(4.0, 5.0)) == pytest.approx(5.0)
    assert seg.projection(Pose2(4.0, 5.0)) == 0.0


def test_segment_distance_matches_dense_sampling():
    rng = np.random.default_rng(3)
    n = 2001
    for _ in range(200):
        a, b, p = rng.uniform(-5.0, 5.0, size=(3, 2))
        seg = geometry.Segment(Pose2(*a), Pose2(*b))
        t = np.linspace(0.0, 1.0, n)[:, None]
        dense = np.min(np.linalg.norm(a + t * (b - a) - p, axis=1))
        exact = seg.distance_to(Pose2(*p))
        assert exact <= dense + 1e-12
        assert dense - exact <= seg.length / (n - 1) + 1e-12


def test_blocks_uses_strict_inequality_on_swept_width():
    corridor = geometry.Corridor(geometry.Segment(Pose2(0.0, 0.0), Pose2(10.0, 0.0)), 1.0)
    assert geometry.blocks(corridor, Pose2(5.0, 1.4), 0.5)
    assert not geometry.blocks(corridor, Pose2(5.0, 1.6), 0.5)
    assert not geometry.blocks(corridor, Pose2(11.6, 0.0), 0.5)


def test_corridor_requires_positive_width():
    with pytest.raises(ValueError):
        geometry.Corridor(geometry.Segment(Pose2(0.0, 0.0), Pose2(1.0, 0.0)), 0.0)


def test_blockers_are_ordered_from_the_start():
    scenario = make_namo(blocks=((3.0, 5.0), (7.0, 5.0), (5.0, 9.0)))
    corridor = geometry.Corridor(geometry.Segment(Pose2(9.0, 5.0), Pose2(1.0, 5.0)), 0.5)
    state = scenario.initial_state()
    assert geometry.blockers(scenario, corridor, state) == ["block1", "block0"]
    assert geometry.blockers(scenario, corridor, state, ignore={"block1"}) == ["block0"]


def test_blocks_ignores_corridor_direction():
    rng = np.random.default_rng(3)
    for _ in range(500):
        a, b, c = rng.uniform(0.0, 10.0, size=(3, 2))
        half_width, radius = rng.uniform(0.1, 1.5, size=2)
        forward = geometry.Corridor(geometry.Segment(Pose2(*a), Pose2(*b)), half_width)
        backward = geometry.Corridor(forward.spine.reversed(), half_width)
        assert geometry.blocks(forward, Pose2(*c), radius) == geometry.blocks(backward, Pose2(*c), radius)


def test_ignoring_more_never_adds_blockers():
    scenario = make_namo(blocks=BLOCKED_LAYOUT)
    state = scenario.initial_state()
    ids = list(state.movable)
    rng = random.Random(8)
    for _ in range(200):
        a = Pose2(rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0))
        b = Pose2(rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0))
        corridor = geometry.Corridor(geometry.Segment(a, b), rng.uniform(0.2, 2.0))
        small = set(rng.sample(ids, rng.randint(0, len(ids))))
        large = small | set(rng.sample(ids, rng.randint(0, len(ids))))
        kept = geometry.blockers(scenario, corridor, state, ignore=large)
        assert set(kept) <= set(geometry.blockers(scenario, corridor, state, ignore=small))
        assert not set(kept) & large


def test_touching_discs_do_not_overlap():
    assert not geometry.discs_overlap(Pose2(0.0, 0.0), 0.5, Pose2(1.0, 0.0), 0.5)
    assert geometry.discs_overlap(Pose2(0.0, 0.0), 0.5, Pose2(0.99, 0.0), 0.5)


# ---------------------------------------------------------------------------
# Approach geometry
# ---------------------------------------------------------------------------


def test_standoff_stops_at_touching_distance():
    standoff = geometry.standoff_pose(Pose2(0.0, 0.0), Pose2(10.0, 0.0), 0.4, 0.5)
    assert standoff.x == pytest.approx(10.0 - 0.91)
    assert standoff.y == pytest.approx(0.0)
    assert geometry.standoff_pose(Pose2(0.0, 0.0), Pose2(0.5, 0.0), 0.4, 0.5) == Pose2(0.0, 0.0)


def test_grasp_corridor_runs_from_the_front():
    scenario = make_cabinet()
    corridor = geometry.grasp_corridor(scenario, "cabinet", Pose2(1.0, 3.5), 0.15)
    assert corridor.spine.a == Pose2(1.0, 2.5)
    assert corridor.spine.b == Pose2(1.0, 3.5)
    assert corridor.half_width == pytest.approx(0.16)
    assert geometry.grasp_corridor(scenario, "table", Pose2(4.0, 1.0), 0.15) is None


# ---------------------------------------------------------------------------
# Sampling and validity
# ---------------------------------------------------------------------------


def test_sample_free_pose_is_free_and_seeded():
    scenario = make_namo(blocks=BLOCKED_LAYOUT)
    state = scenario.initial_state()
    first = geometry.sample_free_pose(scenario, "floor", state, 0.5, random.Random(11))
    again = geometry.sample_free_pose(scenario, "floor", state, 0.5, random.Random(11))
    assert first == again
    assert geometry.region_contains(scenario, "floor", first, 0.5)
    assert geometry.is_free(scenario, state, first, 0.5)


def test_sample_free_pose_respects_accept():
    scenario = make_namo()
    corridor = geometry.Corridor(geometry.Segment(Pose2(0.0, 5.0), Pose2(10.0, 5.0)), 2.0)
    accept = geometry.clear_of([corridor], 0.5)
    rng = random.Random(5)
    for _ in range(20):
        pose = geometry.sample_free_pose(scenario, "floor", scenario.initial_state(), 0.5, rng, accept=accept)
        assert abs(pose.y - 5.0) >= 2.5


def test_sample_free_pose_fails_in_a_full_region():
    scenario = _box(0.45)
    with pytest.raises(RefinementFailure):
        geometry.sample_free_pose(scenario, "box", scenario.initial_state(), 0.45, random.Random(0), max_tries=50)


def test_sample_free_pose_rejects_oversized_disc():
    scenario = _box(0.45)
    with pytest.raises(ScenarioError, match="cannot hold"):
        geometry.sample_free_pose(scenario, "box", scenario.initial_state(), 0.6, random.Random(0))


def test_state_violations_report_overlap_and_region():
    scenario = make_namo()
    state = scenario.initial_state()
    assert geometry.is_valid_state(scenario, state)
    overlapping = state.with_pose("block1", Pose2(2.5, 8.0))
    assert any("overlaps" in p for p in geometry.state_violations(scenario, overlapping))
    outside = state.with_pose("block1", Pose2(9.8, 8.5))
    assert any("outside" in p for p in geometry.state_violations(scenario, outside))
    at_home = state.with_pose("block1", Pose2(5.5, 5.0))
    assert any("home" in p for p in geometry.state_violations(scenario, at_home))


def test_place_randomly_gives_valid_states():
    scenario = make_cabinet()
    placements = {e: ("cabinet" if i % 2 else "table") for i, e in enumerate(scenario.movable_ids)}
    state = geometry.place_randomly(scenario, placements, random.Random(4))
    assert geometry.state_violations(scenario, state) == []
    assert dict(state.symbolic.placements) == placements
    for a in state.in_region("cabinet"):
        for b in state.in_region("cabinet"):
            if a < b:
                gap = state.pose(a).distance(state.pose(b)) - 0.3
                assert gap >= 0.01 - 2e-6
    assert math.isclose(state.pose("robot").x, 3.0)
