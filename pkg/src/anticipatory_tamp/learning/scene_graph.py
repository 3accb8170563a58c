"""World state -> scene graph for the cost regressor.

Nodes are the robot, every container region and every movable object. Node
features: a one-hot over NODE_KINDS, the x/y position and the distance to the
robot. The graph is complete; each undirected edge carries the centre distance
and the number of movable objects obstructing the straight path between its
endpoints (always 0 when an endpoint is a container).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from anticipatory_tamp.domain import geometry, rules
from anticipatory_tamp.models.types import Domain, Pose2, RegionKind, Scenario, WorldState

NODE_KINDS = ("robot", "container", "block", "mug", "bottle", "bowl")
NODE_FEATURES = (*NODE_KINDS, "x", "y", "robot_distance")
EDGE_FEATURES = ("distance", "obstacles")
NODE_DIM = len(NODE_FEATURES)
EDGE_DIM = len(EDGE_FEATURES)
SCHEMA_VERSION = 1


def schema_hash() -> str:
    layout = {"version": SCHEMA_VERSION, "nodes": NODE_FEATURES, "edges": EDGE_FEATURES}
    return hashlib.sha256(json.dumps(layout, sort_keys=True).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class SceneGraph:
    node_ids: tuple[str, ...]
    nodes: np.ndarray  # (n, NODE_DIM)
    edges: np.ndarray  # (m, 2) int, i < j
    edge_features: np.ndarray  # (m, EDGE_DIM)

    @property
    def n_nodes(self) -> int:
        return len(self.node_ids)

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        """Symmetric (n, n, EDGE_DIM) edge tensor and the off-diagonal adjacency mask."""
        n = self.n_nodes
        e = np.zeros((n, n, EDGE_DIM))
        if len(self.edges):
            i, j = self.edges[:, 0], self.edges[:, 1]
            e[i, j] = self.edge_features
            e[j, i] = self.edge_features
        mask = ~np.eye(n, dtype=bool)
        return e, mask

    def to_record(self) -> dict:
        return {
            "ids": list(self.node_ids),
            "nodes": self.nodes.tolist(),
            "edges": self.edges.tolist(),
            "edge_features": self.edge_features.tolist(),
        }

    @classmethod
    def from_record(cls, record: dict) -> SceneGraph:
        return cls(
            node_ids=tuple(record["ids"]),
            nodes=np.asarray(record["nodes"], dtype=float).reshape(-1, NODE_DIM),
            edges=np.asarray(record["edges"], dtype=int).reshape(-1, 2),
            edge_features=np.asarray(record["edge_features"], dtype=float).reshape(-1, EDGE_DIM),
        )


@dataclass(frozen=True)
class _Node:
    id: str
    kind: str
    pose: Pose2
    radius: float
    movable: bool


def _nodes(scenario: Scenario, state: WorldState) -> list[_Node]:
    robot = scenario.robot
    nodes = [_Node(robot.id, "robot", state.pose(robot.id), robot.radius, True)]
    for region in sorted(scenario.regions, key=lambda r: r.id):
        if region.kind == RegionKind.CONTAINER:
            nodes.append(_Node(region.id, "container", region.center, 0.0, False))
    for entity in state.movable:
        if entity == state.symbolic.holding:
            continue
        nodes.append(_Node(entity, scenario.class_of(entity), state.pose(entity), scenario.radius(entity), True))
    return nodes


def obstacle_count(scenario: Scenario, state: WorldState, a: _Node, b: _Node) -> int:
    if not (a.movable and b.movable):
        return 0
    if a.pose.distance(b.pose) == 0.0:
        return 0
    corridor = geometry.Corridor(geometry.Segment(a.pose, b.pose), max(a.radius, b.radius) + rules.CLEARANCE)
    ignore = {a.id, b.id}
    if scenario.domain == Domain.CABINET:
        # Only objects of other semantic classes count as obstacles.
        for node in (a, b):
            if node.kind != "robot":
                ignore.update(scenario.members(scenario.class_of(node.id)))
    return len(geometry.blockers(scenario, corridor, state, ignore=ignore))


def encode_state(scenario: Scenario, state: WorldState) -> SceneGraph:
    nodes = _nodes(scenario, state)
    robot_pose = nodes[0].pose
    features = np.zeros((len(nodes), NODE_DIM))
    for i, node in enumerate(nodes):
        features[i, NODE_KINDS.index(node.kind)] = 1.0
        features[i, len(NODE_KINDS) :] = (node.pose.x, node.pose.y, node.pose.distance(robot_pose))

    pairs = list(combinations(range(len(nodes)), 2))
    edge_features = np.zeros((len(pairs), EDGE_DIM))
    for k, (i, j) in enumerate(pairs):
        a, b = nodes[i], nodes[j]
        edge_features[k] = (a.pose.distance(b.pose), obstacle_count(scenario, state, a, b))
    return SceneGraph(
        node_ids=tuple(n.id for n in nodes),
        nodes=features,
        edges=np.asarray(pairs, dtype=int).reshape(-1, 2),
        edge_features=edge_features,
    )
