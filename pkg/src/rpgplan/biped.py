"""Biped stance model: feet, support modes, reachability, validity checks.

Conventions: x forward, y left, so the left foot of a nominal stance sits at
+lateral_offset in the support frame of the right foot and vice versa.  All
checks exist in two forms: a scalar reference implementation (used by the
independent path validator) and a vectorized batch form (used by the planner
hot loops).  Tests pin the two to each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import shapely

from . import geometry
from .geometry import PlanarRegion
from .space import ExplorePose, wrap_pi, wrap_two_pi

LEFT = "left"
RIGHT = "right"


def other_side(side: str) -> str:
    if side == LEFT:
        return RIGHT
    if side == RIGHT:
        return LEFT
    raise ValueError(f"unknown side {side!r}")


@dataclass(frozen=True)
class FootPose:
    """Planar placement of one foot: position and heading."""

    x: float
    y: float
    yaw: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "yaw", float(wrap_two_pi(self.yaw)))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.yaw])


@dataclass(frozen=True)
class SingleSupport:
    side: str
    pose: FootPose


@dataclass(frozen=True)
class DoubleSupport:
    left: FootPose
    right: FootPose

    @property
    def midpoint(self):
        return ((self.left.x + self.right.x) / 2, (self.left.y + self.right.y) / 2)

    @property
    def mean_yaw(self) -> float:
        d = float(wrap_pi(self.right.yaw - self.left.yaw))
        return float(wrap_two_pi(self.left.yaw + d / 2))


Mode = object  # SingleSupport | DoubleSupport; kept loose for isinstance checks


@dataclass(frozen=True)
class BipedSpec:
    """Robot parameters.

    The default separation keeps the exclusion disk internally tangent to the
    reach disk (lateral_offset + min_separation == step_radius), which makes
    the reachable-region area exactly pi*(step_radius^2 - min_separation^2).
    """

    foot_half_length: float = 0.12
    foot_half_width: float = 0.06
    min_separation: float = 0.15
    lateral_offset: float = 0.20
    step_radius: float = 0.35
    max_yaw_step: float = math.pi / 3
    stand_height: float = 1.4
    crouch_height: float = 0.9
    torso_radius: float = 0.3

    def __post_init__(self):
        if min(
            self.foot_half_length,
            self.foot_half_width,
            self.min_separation,
            self.lateral_offset,
            self.step_radius,
            self.max_yaw_step,
            self.torso_radius,
        ) <= 0:
            raise ValueError("all biped dimensions must be positive")
        if self.step_radius <= self.min_separation:
            raise ValueError("step_radius must exceed min_separation")
        if not (0 < self.crouch_height < self.stand_height):
            raise ValueError("need 0 < crouch_height < stand_height")

    @property
    def foot_circumradius(self) -> float:
        """Half-diagonal of the foot rectangle: the radius that covers the
        foot at every yaw."""
        return math.hypot(self.foot_half_length, self.foot_half_width)

    @property
    def max_step(self) -> float:
        """Farthest reachable swing-foot displacement from the support foot."""
        return self.lateral_offset + self.step_radius

    @property
    def min_torso_z(self) -> float:
        """Lower gate of the necessary-condition height band."""
        return 0.5 * self.crouch_height

    @property
    def torso_box_depth(self) -> float:
        """Vertical extent of the torso clearance box used by transitions."""
        return 0.3 * self.stand_height


def _offset_vec(yaw, lateral_offset):
    """Rot(yaw) @ (0, lateral_offset) as arrays."""
    yaw = np.asarray(yaw, dtype=float)
    return np.stack([-np.sin(yaw) * lateral_offset, np.cos(yaw) * lateral_offset], axis=-1)


def reachable_region(
    spec: BipedSpec, support: FootPose, support_side: str, swing_yaw: Optional[float] = None
) -> PlanarRegion:
    """Placements of the swing foot reachable from ``support`` at the given
    swing heading (default: the support heading).

    In the support frame this is the step disk centered at the lateral offset
    point, intersected with its counterpart for the swing heading (so that the
    relation stays symmetric), minus the separation disk about the support
    foot.  Empty when the heading change exceeds the yaw gate.
    """
    if swing_yaw is None:
        swing_yaw = support.yaw
    if abs(float(wrap_pi(swing_yaw - support.yaw))) > spec.max_yaw_step + 1e-12:
        return PlanarRegion.empty()
    sign = -1.0 if support_side == LEFT else +1.0
    c1 = np.array([support.x, support.y]) + sign * _offset_vec(support.yaw, spec.lateral_offset)
    c2 = np.array([support.x, support.y]) + sign * _offset_vec(swing_yaw, spec.lateral_offset)
    region = geometry.disk(c1[0], c1[1], spec.step_radius)
    if not np.allclose(c1, c2):
        region = region.intersect(geometry.disk(c2[0], c2[1], spec.step_radius))
    return region.difference(geometry.disk(support.x, support.y, spec.min_separation))


def is_reachable(spec: BipedSpec, support: FootPose, support_side: str, target: FootPose) -> bool:
    """True iff the ``target`` placement of the opposite foot is reachable
    from ``support``.  Exactly symmetric: swapping the roles (and sides) of
    the two feet gives the same answer."""
    if abs(float(wrap_pi(target.yaw - support.yaw))) > spec.max_yaw_step + 1e-12:
        return False
    dx = target.x - support.x
    dy = target.y - support.y
    if math.hypot(dx, dy) < spec.min_separation - 1e-12:
        return False
    sign = -1.0 if support_side == LEFT else +1.0
    for yaw in (support.yaw, target.yaw):
        off = sign * _offset_vec(yaw, spec.lateral_offset)
        if math.hypot(dx - off[0], dy - off[1]) > spec.step_radius + 1e-12:
            return False
    return True


def reach_mask(
    spec: BipedSpec,
    support_xyyaw: np.ndarray,
    support_side: str,
    target_xyyaw: np.ndarray,
) -> np.ndarray:
    """Vectorized is_reachable over broadcast (…, 3) arrays."""
    support_xyyaw = np.asarray(support_xyyaw, dtype=float)
    target_xyyaw = np.asarray(target_xyyaw, dtype=float)
    d = target_xyyaw[..., :2] - support_xyyaw[..., :2]
    ok = np.abs(wrap_pi(target_xyyaw[..., 2] - support_xyyaw[..., 2])) <= spec.max_yaw_step + 1e-12
    ok &= np.hypot(d[..., 0], d[..., 1]) >= spec.min_separation - 1e-12
    sign = -1.0 if support_side == LEFT else +1.0
    for yaw in (support_xyyaw[..., 2], target_xyyaw[..., 2]):
        off = sign * _offset_vec(yaw, spec.lateral_offset)
        ok &= np.hypot(d[..., 0] - off[..., 0], d[..., 1] - off[..., 1]) <= spec.step_radius + 1e-12
    return ok


def foot_polygon(spec: BipedSpec, foot: FootPose):
    """Shapely polygon of the oriented foot rectangle."""
    return shapely.polygons(foot_corners(spec, np.array([[foot.x, foot.y, foot.yaw]]))[0])


def foot_corners(spec: BipedSpec, xyyaw: np.ndarray) -> np.ndarray:
    """(n, 4, 2) corner coordinates of oriented foot rectangles."""
    xyyaw = np.asarray(xyyaw, dtype=float)
    c, s = np.cos(xyyaw[:, 2]), np.sin(xyyaw[:, 2])
    hl, hw = spec.foot_half_length, spec.foot_half_width
    local = np.array([[hl, hw], [-hl, hw], [-hl, -hw], [hl, -hw]])
    rot = np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)  # (n, 2, 2)
    return xyyaw[:, None, :2] + np.einsum("nij,kj->nki", rot, local)


# --- environment-dependent checks -----------------------------------------
# ``env`` is any object with .ground (PlanarRegion of the ground rectangle),
# .invalid (PlanarRegion), .obstacles (tuple of Box3), .valid_ground (shapely,
# ground minus invalid, prepared), .robot (BipedSpec).


def necessary_check(env, pose: ExplorePose) -> bool:
    """Necessary condition for any feasible stance projecting to ``pose``:
    the torso height sits in the permissive band, the crouched bounding
    capsule is clear of obstacle boxes, and (x, y) lies over the ground.

    Deliberately permissive: passing here never certifies feasibility.
    """
    spec = env.robot
    if not (spec.min_torso_z <= pose.z <= spec.stand_height):
        return False
    if not env.ground.contains(pose.x, pose.y):
        return False
    r = spec.torso_radius
    for box in env.obstacles:
        if _capsule_hits_box(pose.x, pose.y, pose.z - r, pose.z, r, box):
            return False
    return True


def necessary_check_batch(env, poses: np.ndarray) -> np.ndarray:
    """Vectorized necessary_check over an (n, >=3) pose array (columns
    x, y, z; extra columns ignored)."""
    spec = env.robot
    x, y, z = poses[:, 0], poses[:, 1], poses[:, 2]
    ok = (z >= spec.min_torso_z) & (z <= spec.stand_height)
    gx0, gy0, gx1, gy1 = env.ground_bounds
    tol = geometry.BOUNDARY_TOL
    ok &= (x >= gx0 - tol) & (x <= gx1 + tol) & (y >= gy0 - tol) & (y <= gy1 + tol)
    r = spec.torso_radius
    for box in env.obstacles:
        dx = np.maximum(np.maximum(box.min_corner[0] - x, 0.0), x - box.max_corner[0])
        dy = np.maximum(np.maximum(box.min_corner[1] - y, 0.0), y - box.max_corner[1])
        lo, hi = z - r, z
        dz = np.maximum(np.maximum(box.min_corner[2] - hi, 0.0), lo - box.max_corner[2])
        ok &= dx**2 + dy**2 + dz**2 > r**2
    return ok


def _capsule_hits_box(x, y, z_lo, z_hi, radius, box) -> bool:
    """Vertical capsule (segment (x,y,z_lo)-(x,y,z_hi) inflated by radius)
    versus an axis-aligned box; touching counts as clear."""
    dx = max(box.min_corner[0] - x, 0.0, x - box.max_corner[0])
    dy = max(box.min_corner[1] - y, 0.0, y - box.max_corner[1])
    dz = max(box.min_corner[2] - z_hi, 0.0, z_lo - box.max_corner[2])
    return dx * dx + dy * dy + dz * dz <= radius * radius


def foot_valid(env, foot: FootPose) -> bool:
    """True iff the oriented foot rectangle lies on walkable ground: inside
    the ground rectangle, no positive-area overlap with invalid ground, and
    clear of every obstacle box whose z-range includes the floor."""
    return bool(foot_valid_batch(env, np.array([[foot.x, foot.y, foot.yaw]]))[0])


def foot_valid_batch(env, xyyaw: np.ndarray) -> np.ndarray:
    spec = env.robot
    xyyaw = np.asarray(xyyaw, dtype=float)
    if len(xyyaw) == 0:
        return np.zeros(0, dtype=bool)
    corners = foot_corners(spec, xyyaw)
    gx0, gy0, gx1, gy1 = env.ground_bounds
    tol = geometry.BOUNDARY_TOL
    ok = (
        (corners[:, :, 0] >= gx0 - tol).all(axis=1)
        & (corners[:, :, 0] <= gx1 + tol).all(axis=1)
        & (corners[:, :, 1] >= gy0 - tol).all(axis=1)
        & (corners[:, :, 1] <= gy1 + tol).all(axis=1)
    )
    for box in env.obstacles:
        if box.min_corner[2] <= 0.0 <= box.max_corner[2]:
            ok &= ~_rect_box_overlap(corners, box)
    if not env.invalid.is_empty and ok.any():
        feet = shapely.polygons(corners[ok])
        covered = shapely.covered_by(feet, env.valid_ground)
        res = ok.copy()
        res[np.flatnonzero(ok)] = covered
        return res
    return ok


def _rect_box_overlap(corners: np.ndarray, box) -> np.ndarray:
    """Positive-area overlap between oriented rectangles (n,4,2 corners) and
    the box footprint, via separating axes; touching edges do not count."""
    bx = np.array([box.min_corner[0], box.max_corner[0]])
    by = np.array([box.min_corner[1], box.max_corner[1]])
    overlap = np.ones(len(corners), dtype=bool)
    # world axes
    overlap &= (corners[:, :, 0].min(axis=1) < bx[1]) & (corners[:, :, 0].max(axis=1) > bx[0])
    overlap &= (corners[:, :, 1].min(axis=1) < by[1]) & (corners[:, :, 1].max(axis=1) > by[0])
    # rectangle axes: project box corners onto the rect's edge normals
    box_pts = np.array([[bx[0], by[0]], [bx[1], by[0]], [bx[1], by[1]], [bx[0], by[1]]])
    for e in range(2):
        edge = corners[:, e + 1] - corners[:, e]
        axis = np.stack([-edge[:, 1], edge[:, 0]], axis=-1)
        rect_proj = np.einsum("nkj,nj->nk", corners, axis)
        box_proj = np.einsum("kj,nj->nk", box_pts, axis)
        overlap &= (rect_proj.min(axis=1) < box_proj.max(axis=1)) & (
            rect_proj.max(axis=1) > box_proj.min(axis=1)
        )
    return overlap


def torso_clear(env, mid_x: float, mid_y: float) -> bool:
    """True iff some torso height z in [crouch, stand] puts the clearance box
    (half-width torso_radius, depth 0.3*stand) over (mid_x, mid_y) without
    hitting an obstacle box.

    Scalar reference implementation: sweeps upward from the crouch height,
    jumping over each blocked interval, independent of the vectorized
    candidate search in :func:`torso_clear_batch`."""
    spec = env.robot
    depth = spec.torso_box_depth
    r = spec.torso_radius
    blocked = []
    for box in env.obstacles:
        if (
            mid_x + r > box.min_corner[0]
            and mid_x - r < box.max_corner[0]
            and mid_y + r > box.min_corner[1]
            and mid_y - r < box.max_corner[1]
        ):
            blocked.append((box.min_corner[2], box.max_corner[2] + depth))
    z = spec.crouch_height
    for _ in range(len(blocked) + 1):
        inside = next((iv for iv in blocked if iv[0] < z < iv[1]), None)
        if inside is None:
            return z <= spec.stand_height
        z = inside[1]
    return z <= spec.stand_height


def torso_clear_batch(env, mids: np.ndarray) -> np.ndarray:
    spec = env.robot
    mids = np.asarray(mids, dtype=float)
    if len(mids) == 0:
        return np.zeros(0, dtype=bool)
    depth = spec.torso_box_depth
    r = spec.torso_radius
    lo_z, hi_z = spec.crouch_height, spec.stand_height
    # Candidate box-top heights: the stand height plus, per obstacle, ducking
    # just under it or standing just past it.  The feasible set is a union of
    # closed intervals whose endpoints all appear among these candidates.
    candidates = [np.full(len(mids), hi_z)]
    relevant = []
    for box in env.obstacles:
        over = (
            (mids[:, 0] + r > box.min_corner[0])
            & (mids[:, 0] - r < box.max_corner[0])
            & (mids[:, 1] + r > box.min_corner[1])
            & (mids[:, 1] - r < box.max_corner[1])
        )
        if over.any():
            relevant.append((box, over))
            candidates.append(np.full(len(mids), min(max(box.min_corner[2], lo_z), hi_z)))
            candidates.append(np.full(len(mids), min(max(box.max_corner[2] + depth, lo_z), hi_z)))
    ok = np.zeros(len(mids), dtype=bool)
    for z_top in candidates:
        good = np.ones(len(mids), dtype=bool)
        for box, over in relevant:
            hits = over & (z_top > box.min_corner[2]) & (z_top - depth < box.max_corner[2])
            good &= ~hits
        ok |= good
    return ok


def stance_reachable(spec: BipedSpec, stance: DoubleSupport) -> bool:
    return is_reachable(spec, stance.left, LEFT, stance.right)


def transition_feasible(env, mode_a, mode_b) -> bool:
    """Quasi-static feasibility of a transition between adjacent modes.

    Adjacent means one mode is the other plus/minus one planted foot (double
    support <-> single support on a shared foot).  Requires: both modes'
    feet individually valid, the double-support pair mutually reachable, and
    a clear torso box over the pair's midpoint at some height between crouch
    and stand."""
    ds, ss = None, None
    if isinstance(mode_a, DoubleSupport) and isinstance(mode_b, SingleSupport):
        ds, ss = mode_a, mode_b
    elif isinstance(mode_a, SingleSupport) and isinstance(mode_b, DoubleSupport):
        ds, ss = mode_b, mode_a
    else:
        return False
    shared = ds.left if ss.side == LEFT else ds.right
    if shared != ss.pose:
        return False
    for foot in (ds.left, ds.right):
        if not foot_valid(env, foot):
            return False
    if not stance_reachable(env.robot, ds):
        return False
    mx, my = ds.midpoint
    return torso_clear(env, mx, my)


def project_stance(spec: BipedSpec, stance: DoubleSupport) -> ExplorePose:
    """Exploration-space projection of a double-support stance: midfoot
    position at standing torso height (box top minus torso radius), mean
    heading, level attitude."""
    mx, my = stance.midpoint
    return ExplorePose(mx, my, spec.stand_height - spec.torso_radius, 0.0, 0.0, stance.mean_yaw)


def stance_torso_poses(env, stance: DoubleSupport, n: int = 8):
    """Torso poses swept by a feasible transition of ``stance``: box tops z
    with the clearance box clear, projected at z - torso_radius.  Used by the
    soundness property test."""
    spec = env.robot
    mx, my = stance.midpoint
    depth = spec.torso_box_depth
    r = spec.torso_radius
    out = []
    for z in np.linspace(spec.crouch_height, spec.stand_height, n):
        clear = True
        for box in env.obstacles:
            if (
                mx + r > box.min_corner[0]
                and mx - r < box.max_corner[0]
                and my + r > box.min_corner[1]
                and my - r < box.max_corner[1]
                and z > box.min_corner[2]
                and z - depth < box.max_corner[2]
            ):
                clear = False
                break
        if clear:
            out.append(ExplorePose(mx, my, z - r, 0.0, 0.0, stance.mean_yaw))
    return out


def validate_mode_path(env, modes) -> list:
    """Independent audit of a planner mode path; returns a list of violation
    strings (empty = sound).

    Checks: path starts and ends in double support, alternates support types,
    every foot placement is valid, every double-support pair is mutually
    reachable, and every consecutive pair passes transition_feasible.  Uses
    only the scalar reference implementations."""
    problems = []
    if not modes:
        return ["empty mode path"]
    if not isinstance(modes[0], DoubleSupport):
        problems.append("path does not start in double support")
    if not isinstance(modes[-1], DoubleSupport):
        problems.append("path does not end in double support")
    for i, m in enumerate(modes):
        feet = [m.left, m.right] if isinstance(m, DoubleSupport) else [m.pose]
        for f in feet:
            if not foot_valid(env, f):
                problems.append(f"mode {i}: invalid foot placement {f}")
        if isinstance(m, DoubleSupport) and not stance_reachable(env.robot, m):
            problems.append(f"mode {i}: double-support pair not mutually reachable")
    for i, (a, b) in enumerate(zip(modes[:-1], modes[1:])):
        if not transition_feasible(env, a, b):
            problems.append(f"transition {i} -> {i + 1} infeasible")
    return problems
