"""Shared test fixtures and factories."""

from __future__ import annotations

from anticipatory_tamp.models.types import (
    Bounds,
    Domain,
    EntityClass,
    EntitySpec,
    Pose2,
    PoseSpec,
    RegionKind,
    RegionSpec,
    Scenario,
    WorldState,
)
from anticipatory_tamp.scenario.builtin import default_cabinet_scenario

# Block 1 sits on the straight path from home to block 0.
BLOCKED_LAYOUT = ((8.0, 5.0), (6.5, 5.0), (2.0, 2.0))
OPEN_LAYOUT = ((2.0, 8.0), (5.0, 8.5), (8.0, 8.0))


def make_namo(
    blocks=OPEN_LAYOUT,
    radius=0.5,
    home=(5.0, 5.0),
    robot_radius=0.4,
    size=10.0,
) -> Scenario:
    return Scenario(
        domain=Domain.NAMO,
        name="namo-test",
        bounds=Bounds(xmin=0.0, ymin=0.0, xmax=size, ymax=size),
        robot=EntitySpec(id="robot", cls=EntityClass.ROBOT, radius=robot_radius, pose=PoseSpec(x=home[0], y=home[1])),
        home=PoseSpec(x=home[0], y=home[1]),
        regions=[RegionSpec(id="floor", kind=RegionKind.FLOOR, xmin=0.0, ymin=0.0, xmax=size, ymax=size)],
        entities=[
            EntitySpec(id=f"block{i}", cls=EntityClass.BLOCK, radius=radius, pose=PoseSpec(x=x, y=y), region="floor")
            for i, (x, y) in enumerate(blocks)
        ],
    )


def make_cabinet(multi_class=False) -> Scenario:
    return default_cabinet_scenario(multi_class=multi_class)


def move_to(state: WorldState, placements: dict[str, tuple[str, float, float]]) -> WorldState:
    """Reassign objects to ``region`` at ``(x, y)`` without any validity checks."""
    sym = dict(state.symbolic.placements)
    poses = {}
    for entity, (region, x, y) in placements.items():
        sym[entity] = region
        poses[entity] = Pose2(x, y)
    return state.with_poses(poses).with_symbolic(placements=sym)


def mug_behind_bottle(scenario: Scenario) -> WorldState:
    """mug0 at the back of the cabinet with bottle0 directly in front of it."""
    return move_to(scenario.initial_state(), {"mug0": ("cabinet", 1.0, 3.5), "bottle0": ("cabinet", 1.0, 2.8)})


def mug_behind_mug(scenario: Scenario) -> WorldState:
    return move_to(scenario.initial_state(), {"mug0": ("cabinet", 1.0, 3.5), "mug1": ("cabinet", 1.0, 2.8)})
