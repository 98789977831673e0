"""Six-dimensional exploration space: poses, sampling, metric, segments.

A pose is (x, y, z, roll, pitch, yaw) with Euler angles.  Distances combine
translation and rotation as sqrt(|dp|^2 + w^2 * |dang|^2) where dang takes the
shortest arc per axis; the rotation weight w (default 0.3 m/rad) is a modelling
choice recorded here so that every consumer (segment checks, route lengths,
bound inputs) uses the same geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi
DEFAULT_ROT_WEIGHT = 0.3
DEFAULT_SEGMENT_STEP = 0.05


def wrap_pi(a):
    """Wrap angle(s) to [-pi, pi)."""
    return (np.asarray(a) + math.pi) % TWO_PI - math.pi


def wrap_two_pi(a):
    """Wrap angle(s) to [0, 2*pi)."""
    return np.asarray(a) % TWO_PI


@dataclass(frozen=True)
class ExplorePose:
    x: float
    y: float
    z: float
    roll: float = 0.0
    pitch: float = 0.0
    yaw: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "roll", float(wrap_pi(self.roll)))
        object.__setattr__(self, "pitch", float(wrap_pi(self.pitch)))
        object.__setattr__(self, "yaw", float(wrap_two_pi(self.yaw)))

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def angles(self) -> np.ndarray:
        return np.array([self.roll, self.pitch, self.yaw])

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z, self.roll, self.pitch, self.yaw])


def pose_from_array(a) -> ExplorePose:
    return ExplorePose(*(float(v) for v in a))


@dataclass(frozen=True)
class ExploreBounds:
    """Axis-aligned sampling box: position extents plus one angular interval
    per Euler axis.

    Degenerate (zero-width) extents are allowed and sample as the single
    boundary value; the 6-volume is then zero, which the volume-based bounds
    reject on their own."""

    pos_min: tuple
    pos_max: tuple
    roll_range: tuple = (-math.pi / 6, math.pi / 6)
    pitch_range: tuple = (-math.pi / 6, math.pi / 6)
    yaw_range: tuple = (0.0, TWO_PI)

    def __post_init__(self):
        for axis in range(3):
            if self.pos_max[axis] < self.pos_min[axis]:
                raise ValueError(f"position extent on axis {axis} must be nonnegative")
        for name, (lo, hi) in (
            ("roll", self.roll_range),
            ("pitch", self.pitch_range),
            ("yaw", self.yaw_range),
        ):
            if hi < lo:
                raise ValueError(f"{name} range must have nonnegative width")
            if hi - lo > TWO_PI + 1e-12:
                raise ValueError(f"{name} range wider than a full turn")

    @property
    def volume6(self) -> float:
        """Product of the six extents (m^3 * rad^3)."""
        v = 1.0
        for axis in range(3):
            v *= self.pos_max[axis] - self.pos_min[axis]
        for lo, hi in (self.roll_range, self.pitch_range, self.yaw_range):
            v *= hi - lo
        return v

    def contains(self, pose: ExplorePose, tol: float = 1e-9) -> bool:
        p = (pose.x, pose.y, pose.z)
        for axis in range(3):
            if not (self.pos_min[axis] - tol <= p[axis] <= self.pos_max[axis] + tol):
                return False
        for val, (lo, hi) in (
            (pose.roll, self.roll_range),
            (pose.pitch, self.pitch_range),
            (pose.yaw, self.yaw_range),
        ):
            # compare on the circle so a range like [0, 2*pi) matches wrapped values
            d = (val - lo) % TWO_PI
            if d > (hi - lo) + tol and abs(d - TWO_PI) > tol:
                return False
        return True


def sample_poses(bounds: ExploreBounds, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw n poses uniformly over the bounds box; returns an (n, 6) array.

    Each coordinate is an independent uniform draw; the draw order (x, y, z,
    roll, pitch, yaw per pose block) is fixed so runs are reproducible.
    """
    lo = np.array(
        [
            bounds.pos_min[0],
            bounds.pos_min[1],
            bounds.pos_min[2],
            bounds.roll_range[0],
            bounds.pitch_range[0],
            bounds.yaw_range[0],
        ]
    )
    hi = np.array(
        [
            bounds.pos_max[0],
            bounds.pos_max[1],
            bounds.pos_max[2],
            bounds.roll_range[1],
            bounds.pitch_range[1],
            bounds.yaw_range[1],
        ]
    )
    u = rng.random((n, 6))
    return lo + u * (hi - lo)


def sample_pose(bounds: ExploreBounds, rng: np.random.Generator) -> ExplorePose:
    return pose_from_array(sample_poses(bounds, rng, 1)[0])


def distance(a: ExplorePose, b: ExplorePose, rot_weight: float = DEFAULT_ROT_WEIGHT) -> float:
    """Weighted SE(3) distance: sqrt(|dp|^2 + w^2 |shortest-arc dang|^2).

    Symmetric, zero iff equal up to angle wrapping, satisfies the triangle
    inequality (it is a product metric of Euclidean and scaled circle
    metrics)."""
    dp = b.position - a.position
    da = wrap_pi(b.angles - a.angles)
    return float(math.sqrt(float(dp @ dp) + rot_weight**2 * float(da @ da)))


def distance_arrays(pa: np.ndarray, pb: np.ndarray, rot_weight: float = DEFAULT_ROT_WEIGHT):
    """Vectorized metric over (n, 6) pose arrays (broadcasting allowed)."""
    dp = pb[..., :3] - pa[..., :3]
    da = wrap_pi(pb[..., 3:] - pa[..., 3:])
    return np.sqrt((dp**2).sum(axis=-1) + rot_weight**2 * (da**2).sum(axis=-1))


def interpolate(a: ExplorePose, b: ExplorePose, t: float) -> ExplorePose:
    """Linear in position, shortest-arc per angle; t in [0, 1] maps a -> b."""
    p = a.position + t * (b.position - a.position)
    ang = a.angles + t * wrap_pi(b.angles - a.angles)
    return ExplorePose(p[0], p[1], p[2], ang[0], ang[1], ang[2])


def segment_points(a: np.ndarray, b: np.ndarray, n_pts: int) -> np.ndarray:
    """(n_pts, 6) poses evenly spaced from a to b inclusive, shortest-arc
    angles; a, b are 6-arrays."""
    t = np.linspace(0.0, 1.0, n_pts)[:, None]
    dp = b[:3] - a[:3]
    da = wrap_pi(b[3:] - a[3:])
    pos = a[:3] + t * dp
    ang = a[3:] + t * da
    return np.hstack([pos, ang])


def segment_checks(
    a: np.ndarray, b: np.ndarray, step: float, rot_weight: float = DEFAULT_ROT_WEIGHT
) -> int:
    """Number of evenly spaced poses (endpoints inclusive) needed to test the
    segment a-b at spacing <= step.

    The subdivision count is the next power of two, so a finer step always
    checks a superset of the coarser step's poses: a segment rejected at some
    resolution stays rejected at every finer one."""
    d = float(distance_arrays(a[None, :], b[None, :], rot_weight)[0])
    if d <= step:
        return 2
    return (1 << math.ceil(math.log2(d / step))) + 1


def segment_valid(
    a: ExplorePose,
    b: ExplorePose,
    check,
    step: float = DEFAULT_SEGMENT_STEP,
    rot_weight: float = DEFAULT_ROT_WEIGHT,
) -> bool:
    """True iff ``check`` holds at evenly spaced poses along a -> b, spacing
    <= step, endpoints inclusive (a is tested first)."""
    if step <= 0:
        raise ValueError("segment step must be positive")
    pts = segment_points(a.as_array(), b.as_array(), segment_checks(a.as_array(), b.as_array(), step, rot_weight))
    for row in pts:
        if not check(pose_from_array(row)):
            return False
    return True


@dataclass(frozen=True)
class Route:
    """A polyline through the exploration space from the start projection to
    the goal projection.

    ``vertices`` are spaced closely enough for the mode-sampling stage to
    center one disk per vertex; ``length`` is the metric arclength; and
    ``projected_xy`` is the (n, 2) ground-plane projection consumed by mode
    sampling."""

    vertices: tuple
    length: float
    projected_xy: np.ndarray

    def __len__(self):
        return len(self.vertices)


def make_route(vertices) -> Route:
    vs = tuple(vertices)
    if len(vs) < 2:
        raise ValueError("a route needs at least two vertices")
    total = 0.0
    for u, v in zip(vs[:-1], vs[1:]):
        total += distance(u, v)
    xy = np.array([[v.x, v.y] for v in vs])
    return Route(vertices=vs, length=total, projected_xy=xy)


def subdivide_path(path, spacing: float):
    """Insert evenly spaced intermediate poses so consecutive vertices are at
    most ``spacing`` apart in the metric; endpoints preserved."""
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    out = [path[0]]
    for u, v in zip(path[:-1], path[1:]):
        d = distance(u, v)
        n = max(1, int(math.ceil(d / spacing)))
        for i in range(1, n + 1):
            out.append(interpolate(u, v, i / n))
    return out
