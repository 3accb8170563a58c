"""Continuous-space predicates: disc overlap, straight corridors, blockers, free-pose sampling."""

from __future__ import annotations

import math
import random
from collections.abc import Callable, Collection, Iterable, Mapping
from dataclasses import dataclass

from anticipatory_tamp.domain import rules
from anticipatory_tamp.errors import RefinementFailure, ScenarioError
from anticipatory_tamp.models.types import Domain, Pose2, Scenario, SymbolicState, WorldState


@dataclass(frozen=True, slots=True)
class Segment:
    a: Pose2
    b: Pose2

    @property
    def length(self) -> float:
        return self.a.distance(self.b)

    def reversed(self) -> Segment:
        return Segment(self.b, self.a)

    def projection(self, p: Pose2) -> float:
        """Unclamped position of p's foot along the segment, in meters from ``a``."""
        dx, dy = self.b.x - self.a.x, self.b.y - self.a.y
        length = math.hypot(dx, dy)
        if length == 0.0:
            return 0.0
        return ((p.x - self.a.x) * dx + (p.y - self.a.y) * dy) / length

    def distance_to(self, p: Pose2) -> float:
        dx, dy = self.b.x - self.a.x, self.b.y - self.a.y
        len2 = dx * dx + dy * dy
        if len2 == 0.0:
            return p.distance(self.a)
        t = ((p.x - self.a.x) * dx + (p.y - self.a.y) * dy) / len2
        t = min(1.0, max(0.0, t))
        return math.hypot(p.x - (self.a.x + t * dx), p.y - (self.a.y + t * dy))

    def closest_point(self, p: Pose2) -> Pose2:
        dx, dy = self.b.x - self.a.x, self.b.y - self.a.y
        len2 = dx * dx + dy * dy
        if len2 == 0.0:
            return self.a
        t = min(1.0, max(0.0, ((p.x - self.a.x) * dx + (p.y - self.a.y) * dy) / len2))
        return Pose2(self.a.x + t * dx, self.a.y + t * dy)


@dataclass(frozen=True, slots=True)
class Corridor:
    spine: Segment
    half_width: float

    def __post_init__(self) -> None:
        if not self.half_width > 0.0:
            raise ValueError(f"corridor half_width must be positive, got {self.half_width}")


# ---------------------------------------------------------------------------
# Predicates
# ---------------------------------------------------------------------------


def blocks(corridor: Corridor, obstacle_center: Pose2, obstacle_radius: float) -> bool:
    return corridor.spine.distance_to(obstacle_center) < corridor.half_width + obstacle_radius


def blockers(
    scenario: Scenario,
    corridor: Corridor,
    state: WorldState,
    ignore: Collection[str] = (),
) -> list[str]:
    """Movable entities (minus ``ignore``) intersecting the corridor, nearest to ``spine.a`` first."""
    hits: list[tuple[float, str]] = []
    for entity in state.movable:
        if entity in ignore or entity == state.symbolic.holding:
            continue
        pose = state.poses[entity]
        if blocks(corridor, pose, scenario.radius(entity)):
            hits.append((corridor.spine.projection(pose), entity))
    hits.sort()
    return [e for _, e in hits]


def discs_overlap(p: Pose2, r: float, q: Pose2, s: float) -> bool:
    return p.distance(q) < r + s - rules.OVERLAP_TOLERANCE


def static_discs(scenario: Scenario) -> list[tuple[Pose2, float]]:
    """Keep-out discs that are not movable entities (the NAMO robot's home)."""
    if scenario.domain == Domain.NAMO:
        return [(scenario.home_pose, scenario.robot.radius)]
    return []


def region_contains(scenario: Scenario, region_id: str, pose: Pose2, radius: float) -> bool:
    region = scenario.region(region_id)
    return region.contains(pose, radius) and scenario.bounds.contains(pose, radius)


def is_free(
    scenario: Scenario,
    state: WorldState,
    pose: Pose2,
    radius: float,
    exclude: Collection[str] = (),
    margin: float = 0.0,
) -> bool:
    """True if a disc at ``pose`` (grown by ``margin``) overlaps no placed movable entity and no static keep-out."""
    for entity in state.movable:
        if entity in exclude or entity == state.symbolic.holding:
            continue
        if discs_overlap(pose, radius + margin, state.poses[entity], scenario.radius(entity)):
            return False
    return not any(discs_overlap(pose, radius, c, r) for c, r in static_discs(scenario))


def sample_free_pose(
    scenario: Scenario,
    region_id: str,
    state: WorldState,
    radius: float,
    rng: random.Random,
    max_tries: int = rules.SAMPLE_MAX_TRIES,
    *,
    exclude: Collection[str] = (),
    margin: float = 0.0,
    accept: Callable[[Pose2], bool] | None = None,
) -> Pose2:
    """Uniform rejection sampling of a collision-free pose inside a region's footprint.

    ``margin`` keeps an extra gap to other discs; ``accept`` adds a caller-specific
    rejection test (e.g. stay off a corridor).
    Raises RefinementFailure after ``max_tries`` rejections.
    """
    region = scenario.region(region_id)
    if region.area <= math.pi * radius * radius:
        raise ScenarioError(f"region '{region_id}' cannot hold a disc of radius {radius}")
    xmin = max(region.xmin, scenario.bounds.xmin) + radius
    xmax = min(region.xmax, scenario.bounds.xmax) - radius
    ymin = max(region.ymin, scenario.bounds.ymin) + radius
    ymax = min(region.ymax, scenario.bounds.ymax) - radius
    if xmin > xmax or ymin > ymax:
        raise ScenarioError(f"region '{region_id}' is narrower than a disc of radius {radius}")
    for _ in range(max_tries):
        pose = Pose2(rng.uniform(xmin, xmax), rng.uniform(ymin, ymax))
        if not is_free(scenario, state, pose, radius, exclude, margin):
            continue
        if accept is not None and not accept(pose):
            continue
        return pose
    raise RefinementFailure(f"no free pose for radius {radius} in '{region_id}' after {max_tries} tries")


def clear_of(corridors: Iterable[Corridor], radius: float) -> Callable[[Pose2], bool]:
    """Acceptance test: a disc at the pose blocks none of ``corridors``."""
    corridors = list(corridors)
    return lambda pose: not any(blocks(c, pose, radius) for c in corridors)


# ---------------------------------------------------------------------------
# State validity
# ---------------------------------------------------------------------------


def state_violations(scenario: Scenario, state: WorldState) -> list[str]:
    """Every violated WorldState invariant, as readable messages. Empty means valid."""
    problems: list[str] = []
    placed = [e for e in state.movable if e != state.symbolic.holding]
    for entity in placed:
        pose = state.poses.get(entity)
        if pose is None:
            problems.append(f"{entity} has no pose")
            continue
        if not (math.isfinite(pose.x) and math.isfinite(pose.y)):
            problems.append(f"{entity} has a non-finite pose")
            continue
        region = state.symbolic.placements[entity]
        if not region_contains(scenario, region, pose, scenario.radius(entity)):
            problems.append(f"{entity} lies outside region '{region}'")
    for i, a in enumerate(placed):
        for b in placed[i + 1 :]:
            if a in state.poses and b in state.poses and discs_overlap(
                state.poses[a], scenario.radius(a), state.poses[b], scenario.radius(b)
            ):
                problems.append(f"{a} overlaps {b}")
        for center, r in static_discs(scenario):
            if a in state.poses and discs_overlap(state.poses[a], scenario.radius(a), center, r):
                problems.append(f"{a} overlaps the robot's home")
    return problems


def is_valid_state(scenario: Scenario, state: WorldState) -> bool:
    return not state_violations(scenario, state)


# ---------------------------------------------------------------------------
# Approach corridors
# ---------------------------------------------------------------------------


def standoff_pose(home: Pose2, target: Pose2, robot_radius: float, target_radius: float) -> Pose2:
    """Point short of the target along the home->target ray where the robot touches it (plus clearance)."""
    reach = robot_radius + target_radius + rules.CLEARANCE
    d = home.distance(target)
    if d <= reach:
        return home
    f = (d - reach) / d
    return Pose2(home.x + f * (target.x - home.x), home.y + f * (target.y - home.y))


def navigation_corridor(home: Pose2, standoff: Pose2, robot_radius: float, target_radius: float) -> Corridor:
    return Corridor(Segment(home, standoff), robot_radius + target_radius + rules.CLEARANCE)


def front_segment(scenario: Scenario, region_id: str) -> Segment | None:
    ends = scenario.region(region_id).front_endpoints()
    return Segment(*ends) if ends else None


def grasp_corridor(scenario: Scenario, region_id: str, pose: Pose2, radius: float) -> Corridor | None:
    """Straight access from the nearest point of the region's open front to ``pose``; None for open regions."""
    front = front_segment(scenario, region_id)
    if front is None:
        return None
    return Corridor(Segment(front.closest_point(pose), pose), radius + rules.CLEARANCE)


# ---------------------------------------------------------------------------
# Random states
# ---------------------------------------------------------------------------


def placement_margin(scenario: Scenario, region_id: str) -> float:
    """Gap kept between discs in front-access regions so an object never obstructs one in front of it."""
    return rules.CLEARANCE if front_segment(scenario, region_id) is not None else 0.0


def place_randomly(
    scenario: Scenario,
    placements: Mapping[str, str],
    rng: random.Random,
    attempts: int = rules.STATE_RETRY_BUDGET,
) -> WorldState:
    """Valid state with the given symbolic placements and uniformly sampled free poses."""
    robot = {scenario.robot.id: scenario.robot.pose.to_pose()}
    for _ in range(attempts):
        state = WorldState(SymbolicState(placements={}), dict(robot))
        try:
            for entity in sorted(placements):
                region = placements[entity]
                pose = sample_free_pose(
                    scenario,
                    region,
                    state,
                    scenario.radius(entity),
                    rng,
                    margin=placement_margin(scenario, region),
                )
                state = WorldState(
                    SymbolicState(placements={**state.symbolic.placements, entity: region}),
                    {**state.poses, entity: pose},
                )
        except RefinementFailure:
            continue
        return state
    raise RefinementFailure(f"could not sample a valid state after {attempts} attempts")
