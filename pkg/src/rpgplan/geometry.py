"""Planar polygon regions with erosion, clipping, and inscribed-cylinder search.

Regions are finite unions of simple polygons, holes permitted.  Curved shapes
are polygonized at ``CIRCLE_SEGMENTS`` segments per full circle.  Erosion by a
radius is inward offsetting with round (arc) joins; the arcs use a much finer
polygonization because membership tests against an eroded region must be
trustworthy down to a micrometre band (see ``EROSION_ARC_SEGMENTS``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import shapely
import shapely.affinity
import shapely.validation
from shapely.geometry import MultiPolygon, Point, Polygon
from shapely.geometry.polygon import orient

# Polygonization of curved shapes (disks, expansion arcs).
CIRCLE_SEGMENTS = 64
# Arc joins produced by erosion.  64 segments would deviate from the true
# eroded boundary by up to r*(1 - cos(pi/64)) ~ 1e-4 m, which is visible to
# membership queries; 2048 keeps the deviation below 6e-7 m for r <= 0.5 m.
EROSION_ARC_SEGMENTS = 2048
# Boundary points count as inside within this band.
BOUNDARY_TOL = 1e-9


class GeometryError(ValueError):
    """Raised for invalid polygon topology or empty-stack queries."""


def _as_multipolygon(geom) -> MultiPolygon:
    """Collapse any shapely result to a clean MultiPolygon (dropping slivers
    of lower dimension that clipping can produce)."""
    if geom.is_empty:
        return MultiPolygon([])
    if isinstance(geom, Polygon):
        return MultiPolygon([geom])
    if isinstance(geom, MultiPolygon):
        return geom
    polys = [g for g in getattr(geom, "geoms", []) if isinstance(g, Polygon) and not g.is_empty]
    return MultiPolygon(polys)


@dataclass(frozen=True)
class PlanarRegion:
    """A polygonal subset of the plane.

    Wraps a shapely MultiPolygon.  Construct through :meth:`from_rings`,
    :func:`rectangle`, :func:`disk`, or the region operations below.
    """

    geom: MultiPolygon

    @staticmethod
    def empty() -> "PlanarRegion":
        return PlanarRegion(MultiPolygon([]))

    @staticmethod
    def from_shapely(geom) -> "PlanarRegion":
        mp = _as_multipolygon(geom)
        if not mp.is_valid:
            mp = _as_multipolygon(mp.buffer(0))
        return PlanarRegion(mp)

    @staticmethod
    def from_rings(polygons) -> "PlanarRegion":
        """Build from ``[(outer, [hole, ...]), ...]`` coordinate rings.

        Raises GeometryError for self-intersecting or otherwise invalid
        topology.  Ring orientation is normalized (outer CCW, holes CW).
        """
        polys = []
        for outer, holes in polygons:
            p = Polygon(outer, holes)
            if not p.is_valid:
                raise GeometryError(f"invalid polygon topology: {shapely.validation.explain_validity(p)}")
            polys.append(orient(p, sign=1.0))
        mp = MultiPolygon(polys)
        if not mp.is_valid:
            raise GeometryError(
                f"invalid polygon topology: {shapely.validation.explain_validity(mp)}"
            )
        return PlanarRegion(mp)

    @property
    def rings(self):
        """Rings as ``[(outer, [hole, ...]), ...]`` with outer CCW, holes CW."""
        out = []
        for p in self.geom.geoms:
            p = orient(p, sign=1.0)
            out.append(
                (
                    [tuple(c) for c in p.exterior.coords[:-1]],
                    [[tuple(c) for c in ring.coords[:-1]] for ring in p.interiors],
                )
            )
        return out

    @property
    def is_empty(self) -> bool:
        return self.geom.is_empty

    @property
    def area(self) -> float:
        """Total enclosed area (holes subtracted); >= 0, 0 iff empty."""
        return self.geom.area

    def contains(self, x: float, y: float) -> bool:
        """Point membership; boundary points count as inside (tolerance band
        +-1e-9 m)."""
        return bool(shapely.dwithin(self.geom, Point(x, y), BOUNDARY_TOL))

    def erode(self, radius: float, arc_segments: int = EROSION_ARC_SEGMENTS) -> "PlanarRegion":
        """Inward offset by ``radius``: every point of the result keeps a full
        disk of that radius inside the original region.

        radius = 0 returns an equal region; the result may be empty or split
        into several components.  Negative radii are rejected.
        """
        if radius < 0:
            raise GeometryError(f"erosion radius must be >= 0, got {radius}")
        if self.geom.is_empty:
            return PlanarRegion.empty()
        if radius == 0:
            return PlanarRegion.from_shapely(self.geom)
        eroded = self.geom.buffer(-radius, quad_segs=max(1, arc_segments // 4), join_style="round")
        return PlanarRegion.from_shapely(eroded)

    def dilate(self, radius: float, segments: int = CIRCLE_SEGMENTS) -> "PlanarRegion":
        """Outward offset by ``radius`` with round joins."""
        if radius < 0:
            raise GeometryError(f"dilation radius must be >= 0, got {radius}")
        if radius == 0 or self.geom.is_empty:
            return PlanarRegion.from_shapely(self.geom)
        return PlanarRegion.from_shapely(self.geom.buffer(radius, quad_segs=max(1, segments // 4)))

    def intersect(self, other: "PlanarRegion") -> "PlanarRegion":
        return PlanarRegion.from_shapely(self.geom.intersection(other.geom))

    def union(self, other: "PlanarRegion") -> "PlanarRegion":
        return PlanarRegion.from_shapely(self.geom.union(other.geom))

    def difference(self, other: "PlanarRegion") -> "PlanarRegion":
        return PlanarRegion.from_shapely(self.geom.difference(other.geom))

    def translate(self, dx: float, dy: float) -> "PlanarRegion":
        return PlanarRegion.from_shapely(shapely.affinity.translate(self.geom, dx, dy))

    def clearance(self, x: float, y: float) -> float:
        """Signed distance to the region boundary: positive inside, negative
        outside, 0 on the boundary."""
        p = Point(x, y)
        d = self.geom.boundary.distance(p)
        return d if self.geom.covers(p) else -d

    def bounds(self):
        """(xmin, ymin, xmax, ymax); raises on empty regions."""
        if self.geom.is_empty:
            raise GeometryError("empty region has no bounds")
        return self.geom.bounds


def rectangle(xmin: float, ymin: float, xmax: float, ymax: float) -> PlanarRegion:
    if xmax <= xmin or ymax <= ymin:
        raise GeometryError("rectangle must have positive extent")
    return PlanarRegion.from_shapely(shapely.box(xmin, ymin, xmax, ymax))


def disk(cx: float, cy: float, radius: float, segments: int = CIRCLE_SEGMENTS) -> PlanarRegion:
    if radius <= 0:
        raise GeometryError("disk radius must be positive")
    return PlanarRegion.from_shapely(Point(cx, cy).buffer(radius, quad_segs=max(1, segments // 4)))


def convex_polygon(points) -> PlanarRegion:
    return PlanarRegion.from_rings([(list(points), [])])


@dataclass(frozen=True)
class SE2Cylinder:
    """A set of planar placements: disk footprint x yaw interval.

    ``yaw_lo`` is normalized to [0, 2*pi); the interval extends to
    ``yaw_lo + yaw_span`` with 0 < yaw_span <= 2*pi (wrapping allowed).
    """

    cx: float
    cy: float
    radius: float
    yaw_lo: float
    yaw_span: float

    def __post_init__(self):
        if self.radius <= 0:
            raise GeometryError(f"cylinder radius must be positive, got {self.radius}")
        if not (0 < self.yaw_span <= 2 * math.pi + 1e-12):
            raise GeometryError(f"cylinder yaw span must be in (0, 2*pi], got {self.yaw_span}")
        object.__setattr__(self, "yaw_lo", self.yaw_lo % (2 * math.pi))
        object.__setattr__(self, "yaw_span", min(self.yaw_span, 2 * math.pi))

    @property
    def volume(self) -> float:
        """pi * r^2 * yaw_span."""
        return math.pi * self.radius**2 * self.yaw_span

    def contains(self, x: float, y: float, yaw: float) -> bool:
        if math.hypot(x - self.cx, y - self.cy) > self.radius + BOUNDARY_TOL:
            return False
        return self.contains_yaw(yaw)

    def contains_yaw(self, yaw: float) -> bool:
        if self.yaw_span >= 2 * math.pi - 1e-12:
            return True
        d = (yaw - self.yaw_lo) % (2 * math.pi)
        return d <= self.yaw_span + 1e-12


@dataclass(frozen=True)
class YawSlicedRegion:
    """A stack of planar slices at evenly spaced yaw values.

    Slice i covers the yaw slab [yaw_i, yaw_i + slab) where ``slab`` is the
    common spacing; a single slice therefore represents a slab of angular
    thickness ``slab``, not a zero-measure plane.
    """

    yaws: tuple
    slices: tuple  # of PlanarRegion
    slab: float

    def __post_init__(self):
        if len(self.yaws) != len(self.slices) or not self.yaws:
            raise GeometryError("stack needs matching, non-empty yaw and slice lists")
        if self.slab <= 0:
            raise GeometryError("slab thickness must be positive")
        if len(self.yaws) > 1:
            steps = np.diff(self.yaws)
            if not np.allclose(steps, self.slab, rtol=0, atol=1e-9):
                raise GeometryError("slices must be evenly spaced by the slab thickness")


def largest_inscribed_cylinder(
    stack: YawSlicedRegion, grid_step: float = 0.01
) -> SE2Cylinder:
    """Approximate largest-volume cylinder inscribed in a yaw-sliced stack.

    A cylinder of radius r over the contiguous yaw window of k slices starting
    at slice i is feasible when the disk of radius r about its center lies in
    every slice of the window; its volume is pi*r^2*(k*slab).  The center is
    searched on a coarse-to-fine grid (final resolution ``grid_step``); the
    radius per center is exact (min boundary clearance over the window).

    Raises GeometryError when every slice is empty.
    """
    non_empty = [s for s in stack.slices if not s.is_empty]
    if not non_empty:
        raise GeometryError("all slices empty: no inscribed cylinder exists")

    n = len(stack.slices)
    boundaries = [None if s.is_empty else s.geom.boundary for s in stack.slices]
    geoms = [None if s.is_empty else s.geom for s in stack.slices]

    xmin = min(s.bounds()[0] for s in non_empty)
    ymin = min(s.bounds()[1] for s in non_empty)
    xmax = max(s.bounds()[2] for s in non_empty)
    ymax = max(s.bounds()[3] for s in non_empty)

    def clearances(pts: np.ndarray) -> np.ndarray:
        """(n_slices, n_pts) signed clearance per slice; -inf for empty."""
        shp = shapely.points(pts[:, 0], pts[:, 1])
        out = np.full((n, len(pts)), -np.inf)
        for i in range(n):
            if geoms[i] is None:
                continue
            d = shapely.distance(boundaries[i], shp)
            inside = shapely.covers(geoms[i], shp)
            out[i] = np.where(inside, d, -d)
        return out

    def best_over(pts: np.ndarray):
        cl = clearances(pts)
        best = (0.0, None, None, None)  # volume, center, window start, window len
        for i in range(n):
            run = cl[i].copy()
            for k in range(1, n - i + 1):
                if k > 1:
                    run = np.minimum(run, cl[i + k - 1])
                radii = run
                vols = np.where(radii > 0, math.pi * radii**2 * (k * stack.slab), 0.0)
                j = int(np.argmax(vols))
                if vols[j] > best[0]:
                    best = (float(vols[j]), pts[j], i, k)
        return best

    # Coarse pass on a bounded grid, then refinement at grid_step around the
    # incumbent.  Coarse resolution never exceeds grid_step.
    span = max(xmax - xmin, ymax - ymin)
    coarse = max(grid_step, span / 64)
    xs = np.arange(xmin, xmax + coarse / 2, coarse)
    ys = np.arange(ymin, ymax + coarse / 2, coarse)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    vol, center, win_i, win_k = best_over(pts)
    if center is None:
        raise GeometryError("no feasible cylinder center found on the search grid")

    step = coarse
    while step > grid_step / 2:
        step = max(step / 4, grid_step / 2)
        xs = np.arange(center[0] - 4 * step, center[0] + 4 * step + step / 2, step)
        ys = np.arange(center[1] - 4 * step, center[1] + 4 * step + step / 2, step)
        gx, gy = np.meshgrid(xs, ys)
        pts = np.column_stack([gx.ravel(), gy.ravel()])
        v2, c2, i2, k2 = best_over(pts)
        if v2 > vol:
            vol, center, win_i, win_k = v2, c2, i2, k2

    radius = min(
        stack.slices[s].clearance(center[0], center[1]) for s in range(win_i, win_i + win_k)
    )
    cyl = SE2Cylinder(
        cx=float(center[0]),
        cy=float(center[1]),
        radius=float(radius),
        yaw_lo=float(stack.yaws[win_i]),
        yaw_span=float(win_k * stack.slab),
    )
    # Feasibility re-check: the returned disk (slightly shrunk for float slop)
    # must sit inside every slice of the window.
    check = Point(cyl.cx, cyl.cy).buffer(max(cyl.radius - 1e-9, 1e-12), quad_segs=16)
    for s in range(win_i, win_i + win_k):
        if not stack.slices[s].geom.covers(check):
            raise GeometryError("inscribed cylinder failed its containment re-check")
    return cyl
