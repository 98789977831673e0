"""Hand-rolled reference implementations used to cross-check the geometry
backend.  Deliberately independent: ray casting and segment distances only,
no polygon-clipping library calls."""

import math

import numpy as np


def point_in_ring(x, y, ring):
    """Even-odd ray cast against one closed ring (list of (x, y), no repeat
    of the first vertex)."""
    inside = False
    n = len(ring)
    for i in range(n):
        x0, y0 = ring[i]
        x1, y1 = ring[(i + 1) % n]
        if (y0 > y) != (y1 > y):
            t = (y - y0) / (y1 - y0)
            if x < x0 + t * (x1 - x0):
                inside = not inside
    return inside


def point_in_region(x, y, rings):
    """Membership for ``[(outer, [hole, ...]), ...]`` ring structures."""
    for outer, holes in rings:
        if point_in_ring(x, y, outer):
            if not any(point_in_ring(x, y, h) for h in holes):
                return True
    return False


def dist_point_segment(px, py, ax, ay, bx, by):
    vx, vy = bx - ax, by - ay
    wx, wy = px - ax, py - ay
    vv = vx * vx + vy * vy
    if vv == 0:
        return math.hypot(wx, wy)
    t = max(0.0, min(1.0, (wx * vx + wy * vy) / vv))
    return math.hypot(px - (ax + t * vx), py - (ay + t * vy))


def dist_to_rings(x, y, rings):
    """Minimum distance to any boundary segment of the ring structure."""
    best = math.inf
    for outer, holes in rings:
        for ring in [outer, *holes]:
            n = len(ring)
            for i in range(n):
                ax, ay = ring[i]
                bx, by = ring[(i + 1) % n]
                best = min(best, dist_point_segment(x, y, ax, ay, bx, by))
    return best


def eroded_membership(x, y, rings, radius, circle_dirs=64):
    """Disk-containment oracle: (x, y) belongs to the erosion by ``radius``
    iff the whole disk of that radius lies in the region.  Checked as
    membership of the center and of a dense circle sampling, plus a segment
    distance test (either alone can miss thin-feature cases)."""
    if not point_in_region(x, y, rings):
        return False
    if dist_to_rings(x, y, rings) < radius:
        return False
    for k in range(circle_dirs):
        a = 2 * math.pi * k / circle_dirs
        if not point_in_region(x + radius * math.cos(a), y + radius * math.sin(a), rings):
            return False
    return True


def signed_clearance(x, y, rings):
    """Positive inside, negative outside, zero on the boundary."""
    d = dist_to_rings(x, y, rings)
    return d if point_in_region(x, y, rings) else -d


def mc_area(contains, bbox, n, rng):
    """Rejection-sampling area estimate; ``contains`` takes (x, y) arrays and
    returns a boolean array.  Returns (estimate, 3*sigma)."""
    x0, y0, x1, y1 = bbox
    xs = rng.uniform(x0, x1, n)
    ys = rng.uniform(y0, y1, n)
    hits = contains(xs, ys)
    p = hits.mean()
    box = (x1 - x0) * (y1 - y0)
    sigma = box * math.sqrt(p * (1 - p) / n)
    return box * p, 3 * sigma


def random_simple_polygon(rng, n_min=5, n_max=12, radius=1.0):
    """Star-shaped polygon about a random center: sorted angles with random
    radii, guaranteed simple."""
    n = int(rng.integers(n_min, n_max + 1))
    angles = np.sort(rng.uniform(0, 2 * math.pi, n))
    while np.min(np.diff(angles, append=angles[0] + 2 * math.pi)) < 1e-3:
        angles = np.sort(rng.uniform(0, 2 * math.pi, n))
    radii = rng.uniform(0.3 * radius, radius, n)
    cx, cy = rng.uniform(-1, 1, 2)
    return [(cx + r * math.cos(a), cy + r * math.sin(a)) for r, a in zip(radii, angles)]
