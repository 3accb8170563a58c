"""Default scenarios, constructible without a file."""

from __future__ import annotations

from anticipatory_tamp.errors import ScenarioError
from anticipatory_tamp.models.types import (
    Bounds,
    Domain,
    EntityClass,
    EntitySpec,
    PoseSpec,
    RegionKind,
    RegionSpec,
    Scenario,
)

# Block layout around a home at (5, 5); blocks 8 and 9 sit on the way to blocks 0 and 4.
_NAMO_BLOCKS = [
    (2.0, 8.0),
    (5.0, 8.5),
    (8.0, 8.0),
    (8.5, 5.0),
    (8.0, 2.0),
    (5.0, 1.5),
    (2.0, 2.0),
    (1.5, 5.0),
    (3.5, 6.5),
    (6.5, 3.5),
]

_CABINET_OBJECTS = [EntityClass.MUG, EntityClass.BOTTLE, EntityClass.BOWL]


def default_namo_scenario(n_objects: int = 10) -> Scenario:
    """10 x 10 floor, robot (r=0.4) homed at the centre, ``n_objects`` blocks of radius 0.5."""
    if not 1 <= n_objects <= len(_NAMO_BLOCKS):
        raise ScenarioError(f"namo scenarios hold 1 to {len(_NAMO_BLOCKS)} blocks, got {n_objects}")
    return Scenario(
        domain=Domain.NAMO,
        name=f"namo-{n_objects}",
        bounds=Bounds(xmin=0.0, ymin=0.0, xmax=10.0, ymax=10.0),
        robot=EntitySpec(id="robot", cls=EntityClass.ROBOT, radius=0.4, pose=PoseSpec(x=5.0, y=5.0)),
        home=PoseSpec(x=5.0, y=5.0),
        regions=[RegionSpec(id="floor", kind=RegionKind.FLOOR, xmin=0.0, ymin=0.0, xmax=10.0, ymax=10.0)],
        entities=[
            EntitySpec(id=f"block{i}", cls=EntityClass.BLOCK, radius=0.5, pose=PoseSpec(x=x, y=y), region="floor")
            for i, (x, y) in enumerate(_NAMO_BLOCKS[:n_objects])
        ],
    )


def default_cabinet_scenario(multi_class: bool = False) -> Scenario:
    """Front-opening cabinet and a table; three mugs, bottles and bowls start on the table."""
    entities = []
    xs, ys = (3.8, 4.5, 5.2), (0.5, 1.0, 1.5)
    for row, cls in enumerate(_CABINET_OBJECTS):
        for col in range(3):
            entities.append(
                EntitySpec(
                    id=f"{cls}{col}",
                    cls=cls,
                    radius=0.15,
                    pose=PoseSpec(x=xs[col], y=ys[row]),
                    region="table",
                )
            )
    return Scenario(
        domain=Domain.CABINET,
        name="cabinet-multi" if multi_class else "cabinet",
        bounds=Bounds(xmin=0.0, ymin=0.0, xmax=6.0, ymax=4.0),
        robot=EntitySpec(id="robot", cls=EntityClass.ROBOT, radius=0.3, pose=PoseSpec(x=3.0, y=2.0)),
        stations={"cabinet": PoseSpec(x=1.5, y=2.0), "table": PoseSpec(x=4.5, y=2.0)},
        regions=[
            RegionSpec(id="cabinet", xmin=0.5, ymin=2.5, xmax=2.5, ymax=3.9, front="bottom"),
            RegionSpec(id="table", xmin=3.5, ymin=0.2, xmax=5.5, ymax=1.8),
        ],
        entities=entities,
        multi_class=multi_class,
    )


def default_scenario(domain: Domain, n_objects: int | None = None, multi_class: bool = False) -> Scenario:
    if domain == Domain.NAMO:
        return default_namo_scenario(n_objects or len(_NAMO_BLOCKS))
    return default_cabinet_scenario(multi_class)
