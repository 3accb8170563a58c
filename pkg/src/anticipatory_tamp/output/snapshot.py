"""SVG snapshots of a world state: workspace, regions, objects by class, robot and home."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

from anticipatory_tamp.domain import geometry
from anticipatory_tamp.errors import ScenarioError
from anticipatory_tamp.models.types import EntityClass, Pose2, RegionKind, Scenario, WorldState

# ---------------------------------------------------------------------------
# Class colours
# ---------------------------------------------------------------------------

CLASS_FILLS: dict[EntityClass, str] = {
    EntityClass.ROBOT: "#4c4c4c",
    EntityClass.BLOCK: "#d9822b",
    EntityClass.MUG: "#2b7bd9",
    EntityClass.BOTTLE: "#2bb673",
    EntityClass.BOWL: "#c43bd1",
}

REGION_FILLS: dict[RegionKind, str] = {
    RegionKind.FLOOR: "#f7f7f2",
    RegionKind.CONTAINER: "#e6ddc8",
}


# ---------------------------------------------------------------------------
# SVG canvas
# ---------------------------------------------------------------------------


def _num(v: float) -> str:
    return f"{v:.2f}"


@dataclass
class SvgCanvas:
    """World-coordinate canvas: y points up in the world, down in the image."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float
    scale: float = 60.0
    pad: float = 10.0
    elements: list[str] = field(default_factory=list)

    @property
    def width(self) -> float:
        return (self.xmax - self.xmin) * self.scale + 2 * self.pad

    @property
    def height(self) -> float:
        return (self.ymax - self.ymin) * self.scale + 2 * self.pad

    def px(self, p: Pose2) -> tuple[float, float]:
        return (p.x - self.xmin) * self.scale + self.pad, (self.ymax - p.y) * self.scale + self.pad

    def rect(self, x0: float, y0: float, x1: float, y1: float, fill: str, stroke: str = "#333") -> None:
        left, top = self.px(Pose2(x0, y1))
        w, h = (x1 - x0) * self.scale, (y1 - y0) * self.scale
        self.elements.append(
            f'<rect x="{_num(left)}" y="{_num(top)}" width="{_num(w)}" height="{_num(h)}" '
            f'fill="{fill}" stroke="{stroke}"/>'
        )

    def circle(self, center: Pose2, radius: float, fill: str, stroke: str = "#222", dashed: bool = False) -> None:
        cx, cy = self.px(center)
        dash = ' stroke-dasharray="4 3"' if dashed else ""
        self.elements.append(
            f'<circle cx="{_num(cx)}" cy="{_num(cy)}" r="{_num(radius * self.scale)}" '
            f'fill="{fill}" stroke="{stroke}"{dash}/>'
        )

    def line(self, a: Pose2, b: Pose2, stroke: str, width: float = 3.0) -> None:
        (x0, y0), (x1, y1) = self.px(a), self.px(b)
        self.elements.append(
            f'<line x1="{_num(x0)}" y1="{_num(y0)}" x2="{_num(x1)}" y2="{_num(y1)}" '
            f'stroke="{stroke}" stroke-width="{_num(width)}"/>'
        )

    def text(self, at: Pose2, label: str, size: float = 10.0) -> None:
        x, y = self.px(at)
        self.elements.append(
            f'<text x="{_num(x)}" y="{_num(y)}" font-size="{_num(size)}" text-anchor="middle" '
            f'font-family="monospace">{escape(label)}</text>'
        )

    def render(self) -> str:
        head = (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(self.width)}" '
            f'height="{_num(self.height)}" viewBox="0 0 {_num(self.width)} {_num(self.height)}">'
        )
        return "\n".join([head, *self.elements, "</svg>"]) + "\n"


# ---------------------------------------------------------------------------
# Snapshot
# ---------------------------------------------------------------------------


def draw_state(scenario: Scenario, state: WorldState, title: str = "") -> SvgCanvas:
    b = scenario.bounds
    canvas = SvgCanvas(b.xmin, b.ymin, b.xmax, b.ymax)
    canvas.rect(b.xmin, b.ymin, b.xmax, b.ymax, fill="#ffffff")
    for region in sorted(scenario.regions, key=lambda r: r.id):
        canvas.rect(region.xmin, region.ymin, region.xmax, region.ymax, fill=REGION_FILLS[region.kind])
        front = geometry.front_segment(scenario, region.id)
        if front is not None:
            canvas.line(front.a, front.b, stroke="#2e8b57")
        if region.kind == RegionKind.CONTAINER:
            canvas.text(Pose2(region.center.x, region.ymax - 0.15), region.id)

    if scenario.home is not None:
        canvas.circle(scenario.home_pose, scenario.robot.radius, fill="none", stroke="#4c4c4c", dashed=True)
    for entity in state.movable:
        if entity == state.symbolic.holding:
            continue
        pose = state.pose(entity)
        canvas.circle(pose, scenario.radius(entity), fill=CLASS_FILLS[scenario.class_of(entity)])
        canvas.text(pose, entity, size=8.0)
    robot = scenario.robot
    canvas.circle(state.pose(robot.id), robot.radius, fill=CLASS_FILLS[EntityClass.ROBOT])
    if title:
        canvas.text(Pose2((b.xmin + b.xmax) / 2.0, b.ymax - 0.1), title, size=12.0)
    return canvas


def render_snapshot(scenario: Scenario, state: WorldState, path: Path, title: str = "") -> Path:
    """Write a deterministic SVG of ``state``; same state, same bytes."""
    problems = geometry.state_violations(scenario, state)
    if problems:
        raise ScenarioError("cannot draw an invalid state: " + "; ".join(problems))
    svg = draw_state(scenario, state, title).render()
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(svg)
    except OSError as e:
        raise ScenarioError(f"cannot write snapshot {path}: {e}") from e
    return path
