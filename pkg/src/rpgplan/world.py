"""Flat-ground worlds: environment data, scenario JSON, benchmark builders.

A scenario couples an environment (walkable ground, invalid regions, box
obstacles, exploration bounds, robot parameters) with a start/goal stance
query and optional ground-truth placement cylinders recorded by the builders.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import shapely

from . import biped, geometry
from .biped import BipedSpec, DoubleSupport, FootPose
from .geometry import PlanarRegion, SE2Cylinder
from .space import ExploreBounds, ExplorePose

TWO_PI = 2.0 * math.pi


class ScenarioError(ValueError):
    """Raised for malformed scenario documents or infeasible builder
    parameterizations."""


@dataclass(frozen=True)
class Box3:
    min_corner: tuple
    max_corner: tuple

    def __post_init__(self):
        if len(self.min_corner) != 3 or len(self.max_corner) != 3:
            raise ScenarioError("obstacle boxes need 3D min/max corners")
        if any(hi <= lo for lo, hi in zip(self.min_corner, self.max_corner)):
            raise ScenarioError(f"degenerate obstacle box {self.min_corner}..{self.max_corner}")


@dataclass
class Environment:
    """World model.  Treated as immutable after construction; the derived
    shapely geometry is cached and shared between threads safely."""

    ground_bounds: tuple  # (xmin, ymin, xmax, ymax)
    invalid: PlanarRegion
    obstacles: tuple
    explore_bounds: ExploreBounds
    robot: BipedSpec = field(default_factory=BipedSpec)

    def __post_init__(self):
        gx0, gy0, gx1, gy1 = self.ground_bounds
        if gx1 <= gx0 or gy1 <= gy0:
            raise ScenarioError("ground bounds must have positive extent")
        self.ground = geometry.rectangle(gx0, gy0, gx1, gy1)
        if (
            self.explore_bounds.pos_min[0] > gx0 + 1e-9
            or self.explore_bounds.pos_min[1] > gy0 + 1e-9
            or self.explore_bounds.pos_max[0] < gx1 - 1e-9
            or self.explore_bounds.pos_max[1] < gy1 - 1e-9
        ):
            raise ScenarioError("explore bounds must cover the ground rectangle in x and y")
        self.valid_ground = self.ground.geom.difference(self.invalid.geom)
        shapely.prepare(self.valid_ground)

    @property
    def valid_region(self) -> PlanarRegion:
        """Walkable ground as a region (ground minus invalid)."""
        return PlanarRegion.from_shapely(self.valid_ground)


@dataclass(frozen=True)
class Query:
    start: DoubleSupport
    goal: DoubleSupport

    def start_pose(self, spec: BipedSpec) -> ExplorePose:
        return biped.project_stance(spec, self.start)

    def goal_pose(self, spec: BipedSpec) -> ExplorePose:
        return biped.project_stance(spec, self.goal)


@dataclass
class Scenario:
    name: str
    environment: Environment
    query: Query
    truth_cylinders: tuple = ()

    @property
    def robot(self) -> BipedSpec:
        return self.environment.robot


def _validate_query(env: Environment, query: Query) -> None:
    for label, stance in (("start", query.start), ("goal", query.goal)):
        for side, foot in ((biped.LEFT, stance.left), (biped.RIGHT, stance.right)):
            if not biped.foot_valid(env, foot):
                raise ScenarioError(f"{label} stance {side} foot is not on walkable ground: {foot}")
        if not biped.stance_reachable(env.robot, stance):
            raise ScenarioError(f"{label} stance feet are not mutually reachable")
        mx, my = stance.midpoint
        if not biped.torso_clear(env, mx, my):
            raise ScenarioError(f"{label} stance has no clear torso height")


# --- JSON (de)serialization -------------------------------------------------


def _foot_to_list(f: FootPose):
    return [f.x, f.y, f.yaw]


def _stance_from_doc(doc, label):
    try:
        left = FootPose(*doc["left"])
        right = FootPose(*doc["right"])
    except (KeyError, TypeError) as e:
        raise ScenarioError(f"query.{label}: malformed stance ({e})") from e
    return DoubleSupport(left=left, right=right)


def save_scenario(scenario: Scenario) -> str:
    env = scenario.environment
    gx0, gy0, gx1, gy1 = env.ground_bounds
    doc = {
        "name": scenario.name,
        "ground": {"min": [gx0, gy0], "max": [gx1, gy1]},
        "invalid_ground": [
            {"outer": [list(c) for c in outer], "holes": [[list(c) for c in h] for h in holes]}
            for outer, holes in env.invalid.rings
        ],
        "obstacles": [
            {"min": list(b.min_corner), "max": list(b.max_corner)} for b in env.obstacles
        ],
        "explore_bounds": {
            "min": list(env.explore_bounds.pos_min),
            "max": list(env.explore_bounds.pos_max),
        },
        "query": {
            "start": {
                "left": _foot_to_list(scenario.query.start.left),
                "right": _foot_to_list(scenario.query.start.right),
            },
            "goal": {
                "left": _foot_to_list(scenario.query.goal.left),
                "right": _foot_to_list(scenario.query.goal.right),
            },
        },
        "truth_cylinders": [
            {
                "center": [c.cx, c.cy],
                "radius": c.radius,
                "yaw": [c.yaw_lo, c.yaw_lo + c.yaw_span],
            }
            for c in scenario.truth_cylinders
        ],
    }
    robot = scenario.robot
    default = BipedSpec()
    if robot != default:
        doc["robot"] = {
            "foot_half_length": robot.foot_half_length,
            "foot_half_width": robot.foot_half_width,
            "min_separation": robot.min_separation,
            "lateral_offset": robot.lateral_offset,
            "step_radius": robot.step_radius,
            "max_yaw_step": robot.max_yaw_step,
            "stand_height": robot.stand_height,
            "crouch_height": robot.crouch_height,
            "torso_radius": robot.torso_radius,
        }
    return json.dumps(doc, indent=2)


def load_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"not valid JSON: {e}") from e
    for key in ("ground", "explore_bounds", "query"):
        if key not in doc:
            raise ScenarioError(f"missing required field {key!r}")
    try:
        gmin, gmax = doc["ground"]["min"], doc["ground"]["max"]
    except (KeyError, TypeError) as e:
        raise ScenarioError(f"ground: needs min/max corner lists ({e})") from e
    if len(gmin) != 2 or len(gmax) != 2:
        raise ScenarioError("ground: corners must be 2D")

    robot_doc = doc.get("robot", {})
    if not isinstance(robot_doc, dict):
        raise ScenarioError("robot: must be an object of parameter overrides")
    try:
        robot = BipedSpec(**robot_doc)
    except (TypeError, ValueError) as e:
        raise ScenarioError(f"robot: {e}") from e

    try:
        invalid = PlanarRegion.from_rings(
            [(p["outer"], p.get("holes", [])) for p in doc.get("invalid_ground", [])]
        )
    except (KeyError, TypeError) as e:
        raise ScenarioError(f"invalid_ground: malformed polygon entry ({e})") from e
    except geometry.GeometryError as e:
        raise ScenarioError(f"invalid_ground: {e}") from e

    obstacles = []
    for i, b in enumerate(doc.get("obstacles", [])):
        try:
            obstacles.append(Box3(tuple(b["min"]), tuple(b["max"])))
        except (KeyError, TypeError) as e:
            raise ScenarioError(f"obstacles[{i}]: malformed box ({e})") from e

    eb = doc["explore_bounds"]
    try:
        explore = ExploreBounds(pos_min=tuple(eb["min"]), pos_max=tuple(eb["max"]))
    except (KeyError, TypeError, ValueError) as e:
        raise ScenarioError(f"explore_bounds: {e}") from e

    env = Environment(
        ground_bounds=(gmin[0], gmin[1], gmax[0], gmax[1]),
        invalid=invalid,
        obstacles=tuple(obstacles),
        explore_bounds=explore,
        robot=robot,
    )

    qdoc = doc["query"]
    if "start" not in qdoc or "goal" not in qdoc:
        raise ScenarioError("query: needs start and goal stances")
    query = Query(
        start=_stance_from_doc(qdoc["start"], "start"),
        goal=_stance_from_doc(qdoc["goal"], "goal"),
    )
    _validate_query(env, query)

    cylinders = []
    for i, c in enumerate(doc.get("truth_cylinders", [])):
        try:
            lo, hi = c["yaw"]
            cylinders.append(
                SE2Cylinder(
                    cx=c["center"][0],
                    cy=c["center"][1],
                    radius=c["radius"],
                    yaw_lo=lo,
                    yaw_span=hi - lo,
                )
            )
        except (KeyError, TypeError, IndexError) as e:
            raise ScenarioError(f"truth_cylinders[{i}]: malformed entry ({e})") from e
        except geometry.GeometryError as e:
            raise ScenarioError(f"truth_cylinders[{i}]: {e}") from e

    return Scenario(
        name=str(doc.get("name", "scenario")),
        environment=env,
        query=query,
        truth_cylinders=tuple(cylinders),
    )


# --- builders ---------------------------------------------------------------

_RIM_SETBACK = 0.14  # start/goal feet this far before/after the hazard strip
_STANCE_HALF_WIDTH = 0.1


def _corridor_query(x_start: float, x_goal: float) -> Query:
    w = _STANCE_HALF_WIDTH
    return Query(
        start=DoubleSupport(FootPose(x_start, w, 0.0), FootPose(x_start, -w, 0.0)),
        goal=DoubleSupport(FootPose(x_goal, w, 0.0), FootPose(x_goal, -w, 0.0)),
    )


def _corridor_explore(gx0, gy0, gx1, gy1) -> ExploreBounds:
    return ExploreBounds(pos_min=(gx0, gy0, 0.3), pos_max=(gx1, gy1, 1.6))


def build_stepping_stones(
    gap_width: float = 0.9,
    stone_radius: float = 0.19,
    stone_count: int = 3,
    seed: int = 0,
) -> Scenario:
    """Corridor interrupted by a strip of invalid ground bridged by circular
    stones laid out in a zigzag so alternating feet reach consecutive stones.

    Records one ground-truth cylinder per stone: any foot placement within
    ``stone_radius*cos(pi/64) - foot_circumradius`` of the stone center is
    valid at every yaw (the cosine accounts for the polygonized stone rim).
    """
    spec = BipedSpec()
    if stone_count < 0 or gap_width < 0:
        raise ScenarioError("stone count and gap width must be nonnegative")
    if stone_radius <= spec.foot_half_width:
        raise ScenarioError(
            f"stone radius {stone_radius} must exceed the foot inradius {spec.foot_half_width}"
        )
    r_m = stone_radius * math.cos(math.pi / geometry.CIRCLE_SEGMENTS) - spec.foot_circumradius - 1e-6
    if stone_count > 0 and r_m <= 0:
        raise ScenarioError(
            f"stone radius {stone_radius} leaves no room for a foot at arbitrary yaw "
            f"(foot circumradius {spec.foot_circumradius:.4f})"
        )

    g0 = 1.0
    g1 = g0 + gap_width
    spacing_x = (gap_width + 2 * _RIM_SETBACK) / (stone_count + 1)
    zig = 0.13
    rng = np.random.default_rng(seed)
    centers = []
    for i in range(1, stone_count + 1):
        cx = g0 - _RIM_SETBACK + spacing_x * i
        cy = zig * (1 if i % 2 == 1 else -1) + float(rng.uniform(-0.005, 0.005))
        centers.append((cx, cy))

    hops = [(g0 - _RIM_SETBACK, _STANCE_HALF_WIDTH), *centers, (g1 + _RIM_SETBACK, _STANCE_HALF_WIDTH)]
    for (ax, ay), (bx, by) in zip(hops[:-1], hops[1:]):
        if math.hypot(bx - ax, by - ay) > spec.max_step:
            raise ScenarioError(
                f"stones unreachable: consecutive spacing {math.hypot(bx - ax, by - ay):.3f} "
                f"exceeds the maximum step {spec.max_step:.3f}"
            )
    for (ax, ay), (bx, by) in zip(centers[:-1], centers[1:]):
        if math.hypot(bx - ax, by - ay) <= 2 * stone_radius:
            raise ScenarioError("stones overlap; widen the gap or shrink the stones")

    ground = (0.0, -0.8, g1 + 1.0, 0.8)
    if gap_width > 0:
        invalid = geometry.rectangle(g0, ground[1], g1, ground[3])
        for cx, cy in centers:
            invalid = invalid.difference(geometry.disk(cx, cy, stone_radius))
    else:
        invalid = PlanarRegion.empty()

    env = Environment(
        ground_bounds=ground,
        invalid=invalid,
        obstacles=(),
        explore_bounds=_corridor_explore(*ground),
        robot=spec,
    )
    query = _corridor_query(g0 - _RIM_SETBACK, g1 + _RIM_SETBACK)
    _validate_query(env, query)
    cylinders = tuple(
        SE2Cylinder(cx=cx, cy=cy, radius=r_m, yaw_lo=0.0, yaw_span=TWO_PI) for cx, cy in centers
    )
    return Scenario("stepping-stones", env, query, cylinders)


def build_checkers(cell_size: float = 0.48, rows: int = 4, cols: int = 6) -> Scenario:
    """Corridor interrupted by a checkerboard: cells of one color are
    walkable, the rest of the board strip is invalid.  Crossing hops between
    diagonal neighbors.

    Ground-truth cylinders are recorded along one crossing chain (one cell
    per column, alternating between the two center rows)."""
    spec = BipedSpec()
    if rows < 1 or cols < 1:
        raise ScenarioError("board needs at least 1 row and 1 column")
    if rows == 1 and cols > 1:
        raise ScenarioError(
            "single-row board: walkable cells sit in alternating columns, "
            "two cell widths apart, beyond the maximum step"
        )
    if cell_size <= 2 * spec.foot_circumradius:
        raise ScenarioError(
            f"cell size {cell_size} below the foot diameter {2 * spec.foot_circumradius:.4f}"
        )
    # A diagonal step between touching-corner cells needs feet pulled to the
    # shared corner: the forward gap collapses to one foot length, so it is
    # within reach iff 2*foot_half_len <= step_radius (robot-level property).
    if 2 * spec.foot_half_length > spec.step_radius:
        raise ScenarioError("foot too long for diagonal hops between cells")
    if spec.lateral_offset < 2 * spec.foot_half_width:
        raise ScenarioError("stance offset too narrow for diagonal hops between cells")
    r_m = cell_size / 2 - spec.foot_circumradius - 1e-6

    g0 = 1.0
    g1 = g0 + cols * cell_size
    y0 = -rows * cell_size / 2
    gy = max(0.8, -y0 + 0.3)
    ground = (0.0, -gy, g1 + 1.0, gy)

    strip = geometry.rectangle(g0, ground[1], g1, ground[3])
    invalid = strip
    cell_centers = {}
    for r in range(rows):
        for c in range(cols):
            if (r + c) % 2 == 0:
                x0 = g0 + c * cell_size
                yy0 = y0 + r * cell_size
                invalid = invalid.difference(
                    geometry.rectangle(x0, yy0, x0 + cell_size, yy0 + cell_size)
                )
                cell_centers[(r, c)] = (x0 + cell_size / 2, yy0 + cell_size / 2)

    env = Environment(
        ground_bounds=ground,
        invalid=invalid,
        obstacles=(),
        explore_bounds=_corridor_explore(*ground),
        robot=spec,
    )
    query = _corridor_query(g0 - _RIM_SETBACK, g1 + _RIM_SETBACK)
    _validate_query(env, query)

    # Crossing chain: one valid cell per column, alternating between the two
    # rows nearest the corridor axis (a single-row board uses its only row).
    lo_row = max(rows // 2 - 1, 0)
    hi_row = min(lo_row + 1, rows - 1)
    chain = []
    for c in range(cols):
        row = next(r for r in (lo_row, hi_row) if (r + c) % 2 == 0)
        chain.append(cell_centers[(row, c)])
    cylinders = tuple(
        SE2Cylinder(cx=cx, cy=cy, radius=r_m, yaw_lo=0.0, yaw_span=TWO_PI) for cx, cy in chain
    )
    return Scenario("checkers", env, query, cylinders)


def build_pass_under(
    bar_heights=(1.1, 1.1, 1.1), bar_thickness: float = 0.1, spacing: float = 1.0
) -> Scenario:
    """Open corridor crossed by full-width horizontal bars the robot must
    duck under.  ``bar_heights`` are clearances (bar undersides); each must be
    at least the crouch height or the corridor is impassable."""
    spec = BipedSpec()
    if bar_thickness <= 0 or spacing <= 0:
        raise ScenarioError("bar thickness and spacing must be positive")
    for h in bar_heights:
        if h < spec.crouch_height:
            raise ScenarioError(
                f"bar clearance {h} below the crouch height {spec.crouch_height}: impassable"
            )

    n = len(bar_heights)
    g0 = 1.0
    length = g0 + (max(n - 1, 0)) * spacing + 1.0 if n else 3.0
    ground = (0.0, -1.0, length, 1.0)
    obstacles = tuple(
        Box3(
            (g0 + i * spacing - bar_thickness / 2, ground[1], h),
            (g0 + i * spacing + bar_thickness / 2, ground[3], h + bar_thickness),
        )
        for i, h in enumerate(bar_heights)
    )
    env = Environment(
        ground_bounds=ground,
        invalid=PlanarRegion.empty(),
        obstacles=obstacles,
        explore_bounds=_corridor_explore(*ground),
        robot=spec,
    )
    query = _corridor_query(0.3, length - 0.3)
    _validate_query(env, query)
    return Scenario("pass-under", env, query, ())


BUILDERS = {
    "stepping-stones": build_stepping_stones,
    "checkers": build_checkers,
    "pass-under": build_pass_under,
}
