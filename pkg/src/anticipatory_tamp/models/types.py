"""State, task, plan and scenario models.

Hot-path values (poses, states, actions, plans) are frozen dataclasses: they are
created by the million during candidate sampling and annealing. Everything read
from or written to disk (scenarios, configs) is a pydantic model.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from anticipatory_tamp.domain import rules
from anticipatory_tamp.errors import ScenarioError

SCHEMA_VERSION = 1

# ---------------------------------------------------------------------------
# Enums
# ---------------------------------------------------------------------------


class Domain(enum.StrEnum):
    NAMO = "namo"
    CABINET = "cabinet"


class EntityClass(enum.StrEnum):
    ROBOT = "robot"
    BLOCK = "block"
    MUG = "mug"
    BOTTLE = "bottle"
    BOWL = "bowl"


class RegionKind(enum.StrEnum):
    FLOOR = "floor"  # open workspace, not a graph node
    CONTAINER = "container"


class Predicate(enum.StrEnum):
    IN = "in"
    REACHED = "reached"
    AT_HOME = "athome"


class ActionKind(enum.StrEnum):
    MOVE = "move"
    PICK = "pick"
    PLACE = "place"
    MOVE_CLEAR = "moveclear"


class Variant(enum.StrEnum):
    MYOPIC = "myopic"
    ANTTAMP = "anttamp"
    PREP_MYOPIC = "prep-myopic"
    PREP_ANTTAMP = "prep-anttamp"

    @property
    def prepares(self) -> bool:
        return self in (Variant.PREP_MYOPIC, Variant.PREP_ANTTAMP)

    @property
    def anticipates(self) -> bool:
        return self in (Variant.ANTTAMP, Variant.PREP_ANTTAMP)


# ---------------------------------------------------------------------------
# World state
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Pose2:
    x: float
    y: float

    def distance(self, other: Pose2) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def translated(self, dx: float, dy: float) -> Pose2:
        return Pose2(self.x + dx, self.y + dy)

    def grid_key(self, resolution: float = rules.POSE_RESOLUTION) -> tuple[int, int]:
        return (round(self.x / resolution), round(self.y / resolution))


@dataclass(frozen=True, slots=True)
class SymbolicState:
    """Discrete part of the state: placements, gripper and the current episode's reached targets."""

    placements: Mapping[str, str]
    holding: str | None = None
    reached: frozenset[str] = frozenset()

    @property
    def gripper_empty(self) -> bool:
        return self.holding is None


@dataclass(frozen=True, slots=True)
class WorldState:
    symbolic: SymbolicState
    poses: Mapping[str, Pose2]

    def pose(self, entity: str) -> Pose2:
        try:
            return self.poses[entity]
        except KeyError:
            raise ScenarioError(f"unknown entity '{entity}'") from None

    def placement(self, entity: str) -> str:
        try:
            return self.symbolic.placements[entity]
        except KeyError:
            raise ScenarioError(f"entity '{entity}' has no placement") from None

    @property
    def movable(self) -> list[str]:
        return sorted(self.symbolic.placements)

    def with_pose(self, entity: str, pose: Pose2) -> WorldState:
        poses = dict(self.poses)
        poses[entity] = pose
        return WorldState(self.symbolic, poses)

    def with_poses(self, updates: Mapping[str, Pose2]) -> WorldState:
        poses = dict(self.poses)
        poses.update(updates)
        return WorldState(self.symbolic, poses)

    def with_symbolic(
        self,
        *,
        placements: Mapping[str, str] | None = None,
        holding: str | None | Literal["keep"] = "keep",
        reached: frozenset[str] | None = None,
    ) -> WorldState:
        sym = self.symbolic
        return WorldState(
            SymbolicState(
                placements=dict(placements) if placements is not None else sym.placements,
                holding=sym.holding if holding == "keep" else holding,
                reached=sym.reached if reached is None else reached,
            ),
            self.poses,
        )

    def in_region(self, region: str) -> list[str]:
        return sorted(e for e, r in self.symbolic.placements.items() if r == region)


# ---------------------------------------------------------------------------
# Tasks
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True, order=True)
class Fluent:
    predicate: Predicate
    args: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.predicate.value}({', '.join(self.args)})"


@dataclass(frozen=True, slots=True)
class Task:
    goal: frozenset[Fluent]
    label: str

    def __post_init__(self) -> None:
        if not self.goal:
            raise ScenarioError(f"task '{self.label}' has an empty goal")


@dataclass(frozen=True, slots=True)
class TaskDistribution:
    entries: tuple[tuple[Task, float], ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ScenarioError("task distribution is empty")
        total = 0.0
        for task, p in self.entries:
            if not 0.0 <= p <= 1.0:
                raise ScenarioError(f"probability {p} of '{task.label}' outside [0, 1]")
            total += p
        if abs(total - 1.0) > 1e-9:
            raise ScenarioError(f"task probabilities sum to {total}, expected 1")
        goals = [t.goal for t, _ in self.entries]
        if len(set(goals)) != len(goals):
            raise ScenarioError("task distribution contains duplicate tasks")

    @classmethod
    def uniform(cls, tasks: Iterable[Task]) -> TaskDistribution:
        tasks = list(tasks)
        return cls(tuple((t, 1.0 / len(tasks)) for t in tasks)) if tasks else cls(())

    @property
    def tasks(self) -> list[Task]:
        return [t for t, _ in self.entries]

    @property
    def probabilities(self) -> list[float]:
        return [p for _, p in self.entries]

    def mixture(self, other: TaskDistribution, weight: float) -> TaskDistribution:
        """weight * self + (1 - weight) * other, merging shared tasks."""
        merged: dict[frozenset[Fluent], tuple[Task, float]] = {}
        for dist, w in ((self, weight), (other, 1.0 - weight)):
            for task, p in dist.entries:
                prev = merged.get(task.goal, (task, 0.0))[1]
                merged[task.goal] = (task, prev + w * p)
        return TaskDistribution(tuple(v for v in merged.values() if v[1] > 0.0))


# ---------------------------------------------------------------------------
# Actions and plans
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Relocation:
    entity: str
    pose: Pose2


@dataclass(frozen=True, slots=True)
class GroundAction:
    """One grounded operator.

    move: ``start`` -> ``pose``; pick: ``entity``; place: ``entity`` into ``region`` at ``pose``;
    moveclear: reach ``entity`` at standoff ``pose`` from home ``start`` after ``relocations``.
    """

    kind: ActionKind
    cost: float
    entity: str | None = None
    region: str | None = None
    start: Pose2 | None = None
    pose: Pose2 | None = None
    relocations: tuple[Relocation, ...] = ()

    def describe(self) -> str:
        match self.kind:
            case ActionKind.MOVE:
                return f"move({self.pose.x:.3f},{self.pose.y:.3f})"
            case ActionKind.PICK:
                return f"pick({self.entity})"
            case ActionKind.PLACE:
                return f"place({self.entity},{self.region},{self.pose.x:.3f},{self.pose.y:.3f})"
            case ActionKind.MOVE_CLEAR:
                moved = "+".join(r.entity for r in self.relocations)
                return f"moveclear({self.entity}{';' + moved if moved else ''})"
        return self.kind.value


@dataclass(frozen=True, slots=True)
class Plan:
    actions: tuple[GroundAction, ...]
    initial: WorldState
    terminal: WorldState
    total_cost: float

    def __len__(self) -> int:
        return len(self.actions)

    def count(self, kind: ActionKind) -> int:
        return sum(1 for a in self.actions if a.kind == kind)


# ---------------------------------------------------------------------------
# Scenario (file schema)
# ---------------------------------------------------------------------------


class PoseSpec(BaseModel):
    x: float
    y: float

    def to_pose(self) -> Pose2:
        return Pose2(self.x, self.y)

    @classmethod
    def of(cls, pose: Pose2) -> PoseSpec:
        return cls(x=pose.x, y=pose.y)


class Bounds(BaseModel):
    xmin: float = 0.0
    ymin: float = 0.0
    xmax: float = 10.0
    ymax: float = 10.0

    @model_validator(mode="after")
    def _check_extent(self) -> Bounds:
        if self.xmax <= self.xmin or self.ymax <= self.ymin:
            raise ValueError("workspace bounds must have positive extent")
        return self

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def min_dimension(self) -> float:
        return min(self.width, self.height)

    def contains(self, pose: Pose2, radius: float = 0.0) -> bool:
        return (
            self.xmin + radius <= pose.x <= self.xmax - radius
            and self.ymin + radius <= pose.y <= self.ymax - radius
        )


class RegionSpec(Bounds):
    """Axis-aligned rectangle; containers may designate one open (front) side."""

    id: str
    kind: RegionKind = RegionKind.CONTAINER
    front: Literal["bottom", "top", "left", "right"] | None = None

    @property
    def center(self) -> Pose2:
        return Pose2((self.xmin + self.xmax) / 2.0, (self.ymin + self.ymax) / 2.0)

    @property
    def area(self) -> float:
        return self.width * self.height

    def front_endpoints(self) -> tuple[Pose2, Pose2] | None:
        match self.front:
            case "bottom":
                return Pose2(self.xmin, self.ymin), Pose2(self.xmax, self.ymin)
            case "top":
                return Pose2(self.xmin, self.ymax), Pose2(self.xmax, self.ymax)
            case "left":
                return Pose2(self.xmin, self.ymin), Pose2(self.xmin, self.ymax)
            case "right":
                return Pose2(self.xmax, self.ymin), Pose2(self.xmax, self.ymax)
        return None


class EntitySpec(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    id: str
    cls: EntityClass = Field(EntityClass.BLOCK, alias="class")
    radius: float = Field(gt=0.0)
    pose: PoseSpec
    region: str = ""


class FluentSpec(BaseModel):
    predicate: Predicate
    args: list[str]

    def to_fluent(self) -> Fluent:
        return Fluent(self.predicate, tuple(self.args))


class TaskSpec(BaseModel):
    label: str
    goal: list[FluentSpec]
    probability: float = Field(ge=0.0, le=1.0)


class Scenario(BaseModel):
    """A persistent environment: geometry, entities and (optionally) an explicit task distribution."""

    schema_version: int = SCHEMA_VERSION
    domain: Domain
    name: str = ""
    bounds: Bounds = Field(default_factory=Bounds)
    robot: EntitySpec
    home: PoseSpec | None = None
    stations: dict[str, PoseSpec] = Field(default_factory=dict)
    regions: list[RegionSpec] = Field(default_factory=list)
    entities: list[EntitySpec] = Field(default_factory=list)
    multi_class: bool = False
    tasks: list[TaskSpec] = Field(default_factory=list)

    _entities: dict[str, EntitySpec] = PrivateAttr(default_factory=dict)
    _regions: dict[str, RegionSpec] = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def _check_consistency(self) -> Scenario:
        if self.schema_version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {self.schema_version} (expected {SCHEMA_VERSION})")
        ids = [e.id for e in self.entities] + [self.robot.id]
        if len(set(ids)) != len(ids):
            raise ValueError("entity ids must be unique")
        region_ids = {r.id for r in self.regions}
        if len(region_ids) != len(self.regions):
            raise ValueError("region ids must be unique")
        for e in self.entities:
            if e.region not in region_ids:
                raise ValueError(f"entity '{e.id}' placed in unknown region '{e.region}'")
        if self.domain == Domain.NAMO and self.home is None:
            raise ValueError("namo scenarios need a home pose")
        return self

    def model_post_init(self, __context: object) -> None:
        self._entities = {e.id: e for e in self.entities}
        self._entities[self.robot.id] = self.robot
        self._regions = {r.id: r for r in self.regions}

    # -- lookups ------------------------------------------------------------

    @property
    def movable_ids(self) -> list[str]:
        return sorted(e.id for e in self.entities)

    def entity(self, entity_id: str) -> EntitySpec:
        try:
            return self._entities[entity_id]
        except KeyError:
            raise ScenarioError(f"unknown entity '{entity_id}'") from None

    def region(self, region_id: str) -> RegionSpec:
        try:
            return self._regions[region_id]
        except KeyError:
            raise ScenarioError(f"unknown region '{region_id}'") from None

    def radius(self, entity_id: str) -> float:
        return self.entity(entity_id).radius

    def class_of(self, entity_id: str) -> EntityClass:
        return self.entity(entity_id).cls

    def members(self, cls: EntityClass) -> list[str]:
        return sorted(e.id for e in self.entities if e.cls == cls)

    @property
    def semantic_classes(self) -> list[EntityClass]:
        return sorted({e.cls for e in self.entities}, key=list(EntityClass).index)

    @property
    def home_pose(self) -> Pose2:
        if self.home is None:
            raise ScenarioError(f"scenario '{self.name}' has no home pose")
        return self.home.to_pose()

    def station(self, region_id: str) -> Pose2:
        try:
            return self.stations[region_id].to_pose()
        except KeyError:
            raise ScenarioError(f"no robot station for region '{region_id}'") from None

    def initial_state(self) -> WorldState:
        poses = {e.id: e.pose.to_pose() for e in self.entities}
        poses[self.robot.id] = self.robot.pose.to_pose()
        return WorldState(SymbolicState(placements={e.id: e.region for e in self.entities}), poses)


# ---------------------------------------------------------------------------
# Configs
# ---------------------------------------------------------------------------


class SolverConfig(BaseModel):
    skeleton_retry_budget: int = Field(rules.SKELETON_RETRY_BUDGET, ge=1)
    refinement_retry_budget: int = Field(rules.REFINEMENT_RETRY_BUDGET, ge=1)
    rng_seed: int = 0
    # Same-class objects scheduled for removal by the task are not obstructions.
    interchangeable_obstruction: bool = True


class AnnealingSchedule(BaseModel):
    initial_temperature: float = Field(rules.INITIAL_TEMPERATURE, gt=0.0)
    cooling_rate: float = Field(rules.COOLING_RATE, gt=0.0, lt=1.0)
    iterations: int = Field(rules.NAMO_PREP_ITERATIONS, ge=0)
    perturbation_fraction: float = Field(rules.PERTURBATION_FRACTION, gt=0.0)
    jump_probability: float = Field(rules.JUMP_PROBABILITY, ge=0.0, le=1.0)

    def temperature(self, i: int) -> float:
        return self.initial_temperature * self.cooling_rate**i


class Settings(BaseModel):
    """User-level defaults, overridable from the environment."""

    workers: int = Field(1, ge=1)
    output_dir: str = "results"
    oracle_samples: int = Field(rules.ORACLE_SAMPLES_PER_TASK, ge=1)
