"""Three-stage footstep planner.

Stage 1 (exploration) samples torso poses satisfying the permissive necessary
condition, connects them through collision-checked straight segments, and
extracts candidate routes.  Stage 2 (mode sampling) draws foot placements
uniformly over a union of disks swept along a route's ground projection.
Stage 3 builds the quasi-static mode graph over those placements and searches
it breadth-first for an alternating support sequence from the start stance to
the goal stance.

Everything is driven by one numpy Generator, so a run is a pure function of
(scenario, params, seed).
"""

from __future__ import annotations

import heapq
import math
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import shapely
from scipy.spatial import cKDTree

from . import biped, space
from .biped import LEFT, RIGHT, DoubleSupport, FootPose, SingleSupport
from .space import (
    DEFAULT_ROT_WEIGHT,
    DEFAULT_SEGMENT_STEP,
    ExplorePose,
    Route,
    distance_arrays,
    make_route,
    pose_from_array,
    sample_poses,
    subdivide_path,
    wrap_pi,
)

SOLVED = "solved"
BUDGET_EXHAUSTED = "budget_exhausted"

TWO_PI = 2.0 * math.pi


class PlanError(ValueError):
    """Raised when a query cannot even enter the pipeline (e.g. its start or
    goal projection violates the necessary condition)."""


@dataclass(frozen=True)
class PlanParams:
    """Budgets and geometry knobs for one planning call.

    ``initial_n_p`` and ``initial_n_sigma`` are round-1 budgets; each round
    doubles the cumulative exploration-sample target and the per-route
    placement draw count, and samples accumulate across rounds."""

    rho: float
    initial_n_p: int = 2000
    initial_n_sigma: int = 2000
    max_rounds: int = 4
    routes_per_round: int = 3
    segment_step: float = DEFAULT_SEGMENT_STEP
    rot_weight: float = DEFAULT_ROT_WEIGHT

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if min(self.initial_n_p, self.initial_n_sigma, self.max_rounds) < 1:
            raise ValueError("budgets must be at least 1")


@dataclass
class PlanResult:
    status: str
    mode_path: Optional[list]
    route: Optional[Route]
    rounds_used: int
    n_p_used: int
    n_sigma_used: int
    raw_pose_draws: int
    placements_discarded: int
    wall_ms: float

    @property
    def solved(self) -> bool:
        return self.status == SOLVED

    @property
    def path_len(self) -> Optional[int]:
        return len(self.mode_path) if self.mode_path is not None else None

    @property
    def samples_used(self) -> int:
        """Total sampling effort: accepted exploration samples plus placement
        draws.  The harness's samples-to-success metric."""
        return self.n_p_used + self.n_sigma_used


@dataclass(frozen=True)
class SampleRegion:
    """The placement-sampling region: a union of equal disks centered on the
    route's projected vertices.  ``total_area`` is the area of the union
    (computed from a circumscribed polygonization so it never understates the
    true disk union)."""

    centers: np.ndarray
    radius: float
    total_area: float

    @property
    def disk_count(self) -> int:
        return len(self.centers)

    def contains(self, x, y) -> np.ndarray:
        pts = np.column_stack([np.atleast_1d(x), np.atleast_1d(y)])
        d2 = ((pts[:, None, :] - self.centers[None, :, :]) ** 2).sum(axis=2)
        return (d2 <= self.radius**2).any(axis=1)


def disk_union_area(centers: np.ndarray, radius: float, segments: int = 256) -> float:
    r = radius / math.cos(math.pi / segments)
    disks = [shapely.Point(c[0], c[1]).buffer(r, quad_segs=segments // 4) for c in centers]
    return float(shapely.union_all(disks).area)


class ExplorationGraph:
    """Growable pose graph with memoized lazy edge validation.

    Node 0 is the start projection, node 1 the goal projection.  An edge
    exists when the straight segment between two poses passes the necessary
    condition at spacing <= segment_step; validity is computed on demand
    (batched per settled node during the A* search) and memoized, which
    returns exactly the same routes as validating all O(n^2) pairs up front.
    """

    def __init__(self, env, start_pose: ExplorePose, goal_pose: ExplorePose,
                 params: PlanParams, rng: np.random.Generator):
        self.env = env
        self.params = params
        self._rng = rng
        if not biped.necessary_check(env, start_pose):
            raise PlanError("start projection fails the necessary condition")
        if not biped.necessary_check(env, goal_pose):
            raise PlanError("goal projection fails the necessary condition")
        self.nodes = np.vstack([start_pose.as_array(), goal_pose.as_array()])
        self.accepted = 0  # sampled nodes, excluding start/goal
        self.raw_draws = 0
        self.truncated = False
        # per-node row cache: node -> (validated_up_to, bool validity array)
        self._rows: dict[int, tuple[int, np.ndarray]] = {}

    def __len__(self):
        return len(self.nodes)

    def extend_to(self, target_accepted: int) -> None:
        """Sample until ``target_accepted`` poses passed the necessary
        condition (raw draws are recorded; a generous cap guards against
        near-empty necessary sets)."""
        cap = self.raw_draws + 2000 * max(target_accepted - self.accepted, 0) + 10_000
        while self.accepted < target_accepted:
            if self.raw_draws >= cap:
                self.truncated = True
                break
            need = target_accepted - self.accepted
            m = int(min(max(512, 2 * need), 200_000))
            draws = sample_poses(self.env.explore_bounds, self._rng, m)
            self.raw_draws += m
            ok = biped.necessary_check_batch(self.env, draws)
            take = draws[ok][:need]
            if len(take):
                self.nodes = np.vstack([self.nodes, take])
                self.accepted += len(take)

    # -- edges ---------------------------------------------------------------

    def _edges_from(self, u: int, cand: np.ndarray) -> np.ndarray:
        """Validity of segments u -> cand (memoized row-wise)."""
        n = len(self.nodes)
        upto, row = self._rows.get(u, (0, np.zeros(0, dtype=bool)))
        if upto < n:
            new_idx = np.arange(upto, n)
            validity = self._validate_segments(u, new_idx)
            row = np.concatenate([row, validity])
            self._rows[u] = (n, row)
        return row[cand]

    def _validate_segments(self, u: int, vs: np.ndarray) -> np.ndarray:
        if len(vs) == 0:
            return np.zeros(0, dtype=bool)
        a = self.nodes[u]
        out = np.zeros(len(vs), dtype=bool)
        # chunk so one batch stays within ~2e6 interpolated poses
        step = self.params.segment_step
        dists = distance_arrays(a[None, :], self.nodes[vs], self.params.rot_weight)
        # same dyadic subdivision as segment_checks
        n_pts = (1 << np.ceil(np.log2(np.maximum(dists / step, 1.0))).astype(int)) + 1
        order = np.arange(len(vs))
        start = 0
        while start < len(vs):
            end = start
            total = 0
            while end < len(vs) and total + n_pts[end] <= 2_000_000:
                total += n_pts[end]
                end += 1
            end = max(end, start + 1)
            sel = order[start:end]
            out[sel] = self._validate_chunk(a, self.nodes[vs[sel]], n_pts[sel])
            start = end
        return out

    def _validate_chunk(self, a: np.ndarray, bs: np.ndarray, n_pts: np.ndarray) -> np.ndarray:
        cum = np.concatenate([[0], np.cumsum(n_pts)])
        total = cum[-1]
        pair_id = np.repeat(np.arange(len(bs)), n_pts)
        t = ((np.arange(total) - cum[pair_id]) / (n_pts[pair_id] - 1))[:, None]
        dp = bs[:, :3] - a[:3]
        da = wrap_pi(bs[:, 3:] - a[3:])
        pts = np.empty((total, 6))
        pts[:, :3] = a[:3] + t * dp[pair_id]
        pts[:, 3:] = a[3:] + t * da[pair_id]
        ok = biped.necessary_check_batch(self.env, pts)
        return np.logical_and.reduceat(ok, cum[:-1])

    # -- search --------------------------------------------------------------

    def _astar(self, excluded: set) -> Optional[list]:
        n = len(self.nodes)
        alive = np.ones(n, dtype=bool)
        if excluded:
            alive[list(excluded)] = False
        if not (alive[0] and alive[1]):
            return None
        h = distance_arrays(self.nodes, self.nodes[1][None, :], self.params.rot_weight)
        dist = np.full(n, np.inf)
        dist[0] = 0.0
        parent = np.full(n, -1, dtype=np.int64)
        settled = np.zeros(n, dtype=bool)
        heap = [(float(h[0]), 0.0, 0)]
        while heap:
            _, g, u = heapq.heappop(heap)
            if settled[u] or g > dist[u] + 1e-12:
                continue
            settled[u] = True
            if u == 1:
                path = [1]
                while path[-1] != 0:
                    path.append(int(parent[path[-1]]))
                return path[::-1]
            cand = np.flatnonzero(alive & ~settled)
            if len(cand) == 0:
                continue
            ok = self._edges_from(u, cand)
            targets = cand[ok]
            if len(targets) == 0:
                continue
            w = distance_arrays(self.nodes[u][None, :], self.nodes[targets], self.params.rot_weight)
            nd = g + w
            better = nd < dist[targets] - 1e-15
            for v, d in zip(targets[better], nd[better]):
                dist[v] = d
                parent[v] = u
                heapq.heappush(heap, (float(d + h[v]), float(d), int(v)))
        return None

    def routes(self, k: int, vertex_spacing: float) -> list:
        """Up to k routes, best-first by arclength; later routes avoid the
        interior vertices of earlier ones.  Route vertices are subdivided at
        ``vertex_spacing`` and re-verified against the necessary condition."""
        found_paths = []
        removed: set = set()
        for _ in range(k):
            path = self._astar(removed)
            if path is None or path in found_paths:
                break
            found_paths.append(path)
            interior = path[1:-1]
            if not interior:
                break
            removed.update(interior)
        routes = []
        for path in found_paths:
            r = self._as_route(path, vertex_spacing)
            if r is not None:
                routes.append(r)
        return routes

    def _as_route(self, path: list, vertex_spacing: float) -> Optional[Route]:
        poses = [pose_from_array(self.nodes[i]) for i in path]
        dense = subdivide_path(poses, vertex_spacing)
        arr = np.array([p.as_array() for p in dense])
        if not biped.necessary_check_batch(self.env, arr).all():
            return None
        return make_route(dense)


def explore(env, query, n_p: int, rng: np.random.Generator, rho: float,
            params: Optional[PlanParams] = None, k_routes: int = 3) -> list:
    """One-shot exploration stage: sample ``n_p`` accepted poses and return up
    to ``k_routes`` routes between the query's stance projections."""
    if n_p < 0:
        raise ValueError("n_p must be nonnegative")
    params = params or PlanParams(rho=rho, initial_n_p=max(n_p, 1))
    spec = env.robot
    g = ExplorationGraph(env, query.start_pose(spec), query.goal_pose(spec), params, rng)
    g.extend_to(n_p)
    return g.routes(k_routes, rho / 4)


# --- stage 2: mode sampling -------------------------------------------------


def sample_modes(env, route: Route, rho: float, n_per_foot: int, rng: np.random.Generator):
    """Draw ``n_per_foot`` placements per foot uniformly over the union of
    disks of radius ``rho`` about the route's projected vertices, give each a
    uniform heading, and discard placements whose foot is not on walkable
    ground.

    Returns (region, survivors_left, survivors_right, drawn, discarded) where
    survivors are (k, 3) arrays of (x, y, yaw).
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    centers = np.asarray(route.projected_xy, dtype=float)
    region = SampleRegion(centers=centers, radius=rho, total_area=disk_union_area(centers, rho))
    k = len(centers)
    r2 = rho * rho
    placements = {}
    for side in (LEFT, RIGHT):
        got = [np.zeros((0, 2))]
        n_acc = 0
        while n_acc < n_per_foot:
            need = n_per_foot - n_acc
            m = int(min(max(2048, 3 * need), 400_000))
            di = rng.integers(0, k, m)
            rad = rho * np.sqrt(rng.random(m))
            ang = TWO_PI * rng.random(m)
            pts = centers[di] + np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
            d2 = ((pts[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            counts = (d2 <= r2 + 1e-12).sum(axis=1)
            accept = rng.random(m) * counts < 1.0
            pts = pts[accept]
            take = min(len(pts), need)
            if take:
                got.append(pts[:take])
                n_acc += take
        xy = np.vstack(got)
        yaw = TWO_PI * rng.random(n_per_foot)
        placements[side] = np.column_stack([xy, yaw])
    ok_l = biped.foot_valid_batch(env, placements[LEFT])
    ok_r = biped.foot_valid_batch(env, placements[RIGHT])
    drawn = 2 * n_per_foot
    discarded = int((~ok_l).sum() + (~ok_r).sum())
    return region, placements[LEFT][ok_l], placements[RIGHT][ok_r], drawn, discarded


# --- stage 3: mode graph ----------------------------------------------------


@dataclass
class ModeGraph:
    """Quasi-static support-mode graph over foot placements.

    Single-support nodes are the placements themselves; double-support nodes
    are mutually reachable left/right pairs; transitions (plant or lift the
    swing foot) additionally require a clear torso box over the pair."""

    left: np.ndarray
    right: np.ndarray
    pair_left: np.ndarray
    pair_right: np.ndarray
    pair_feasible: np.ndarray

    @property
    def double_support_count(self) -> int:
        return len(self.pair_left)


def _reach_pairs(spec, left: np.ndarray, right: np.ndarray, chunk: int):
    """Index pairs (li, ri) with right[ri] reachable from left[li], in
    row-major order.  Reachable pairs are never farther apart than
    step_radius + lateral_offset = max_step, so a KD radius query is an
    exact prefilter of the full cross product."""
    if not (len(left) and len(right)):
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    coo = cKDTree(left[:, :2]).sparse_distance_matrix(
        cKDTree(right[:, :2]), spec.max_step + 1e-9, output_type="coo_matrix")
    cand_l = coo.row.astype(np.int64)
    cand_r = coo.col.astype(np.int64)
    order = np.lexsort((cand_r, cand_l))  # row-major, independent of tree layout
    cand_l, cand_r = cand_l[order], cand_r[order]
    keep_l, keep_r = [], []
    for lo in range(0, len(cand_l), chunk):
        sel = slice(lo, lo + chunk)
        mask = biped.reach_mask(spec, left[cand_l[sel]], LEFT, right[cand_r[sel]])
        keep_l.append(cand_l[sel][mask])
        keep_r.append(cand_r[sel][mask])
    return np.concatenate(keep_l), np.concatenate(keep_r)


class _PairPool:
    """Accumulates placements and maintains the double-support pair set
    incrementally: each batch of new placements is paired only against the
    placements already present, never recomputing existing pairs."""

    def __init__(self, env, left0: np.ndarray, right0: np.ndarray):
        self.env = env
        self.left = np.asarray(left0, dtype=float).reshape(-1, 3)
        self.right = np.asarray(right0, dtype=float).reshape(-1, 3)
        pl, pr = _reach_pairs(env.robot, self.left, self.right, 2_000_000)
        self._pl = [pl]
        self._pr = [pr]
        self._feas = [self._torso_ok(self.left, pl, self.right, pr)]

    def _torso_ok(self, left, pl, right, pr):
        if not len(pl):
            return np.zeros(0, dtype=bool)
        mids = (left[pl, :2] + right[pr, :2]) / 2
        return biped.torso_clear_batch(self.env, mids)

    def extend(self, new_left: np.ndarray, new_right: np.ndarray) -> None:
        spec = self.env.robot
        new_left = np.asarray(new_left, dtype=float).reshape(-1, 3)
        new_right = np.asarray(new_right, dtype=float).reshape(-1, 3)
        if len(new_left):
            pl, pr = _reach_pairs(spec, new_left, self.right, 2_000_000)
            pl += len(self.left)
            self.left = np.vstack([self.left, new_left])
            self._pl.append(pl)
            self._pr.append(pr)
            self._feas.append(self._torso_ok(self.left, pl, self.right, pr))
        if len(new_right):
            pl, pr = _reach_pairs(spec, self.left, new_right, 2_000_000)
            pr += len(self.right)
            self.right = np.vstack([self.right, new_right])
            self._pl.append(pl)
            self._pr.append(pr)
            self._feas.append(self._torso_ok(self.left, pl, self.right, pr))

    def graph(self) -> ModeGraph:
        return ModeGraph(
            left=self.left, right=self.right,
            pair_left=np.concatenate(self._pl), pair_right=np.concatenate(self._pr),
            pair_feasible=np.concatenate(self._feas),
        )


def build_mode_graph(env, left: np.ndarray, right: np.ndarray, chunk: int = 2_000_000) -> ModeGraph:
    spec = env.robot
    left = np.asarray(left, dtype=float).reshape(-1, 3)
    right = np.asarray(right, dtype=float).reshape(-1, 3)
    pair_l, pair_r = _reach_pairs(spec, left, right, chunk)
    if len(pair_l):
        mids = (left[pair_l, :2] + right[pair_r, :2]) / 2
        feasible = biped.torso_clear_batch(env, mids)
    else:
        feasible = np.zeros(0, dtype=bool)
    return ModeGraph(left=left, right=right, pair_left=pair_l, pair_right=pair_r, pair_feasible=feasible)


def search_modes(graph: ModeGraph, start_pair=(0, 0), goal_pair=(1, 1)) -> Optional[list]:
    """Shortest alternating mode sequence (by transition count) from the
    start double-support node to the goal double-support node, or None.

    Node states are encoded as ints: [0, nDS) double support, then left
    single supports, then right."""
    n_ds = len(graph.pair_left)
    n_l, n_r = len(graph.left), len(graph.right)
    start = _find_pair(graph, *start_pair)
    goal = _find_pair(graph, *goal_pair)
    if start is None or goal is None:
        return None
    if start == goal:
        return [_ds_mode(graph, start)]
    if not (graph.pair_feasible[start] and graph.pair_feasible[goal]):
        return None

    order = np.argsort(graph.pair_left, kind="stable")
    left_starts = np.searchsorted(graph.pair_left[order], np.arange(n_l + 1))
    order_r = np.argsort(graph.pair_right, kind="stable")
    right_starts = np.searchsorted(graph.pair_right[order_r], np.arange(n_r + 1))

    def ds_neighbors(k):
        if not graph.pair_feasible[k]:
            return ()
        return (n_ds + graph.pair_left[k], n_ds + n_l + graph.pair_right[k])

    def ss_neighbors(state):
        if state < n_ds + n_l:
            i = state - n_ds
            grp = order[left_starts[i] : left_starts[i + 1]]
        else:
            j = state - n_ds - n_l
            grp = order_r[right_starts[j] : right_starts[j + 1]]
        return grp[graph.pair_feasible[grp]]

    total = n_ds + n_l + n_r
    parent = np.full(total, -2, dtype=np.int64)
    parent[start] = -1
    queue = deque([start])
    while queue:
        u = queue.popleft()
        if u == goal:
            break
        nbrs = ds_neighbors(u) if u < n_ds else ss_neighbors(u)
        for v in nbrs:
            v = int(v)
            if parent[v] == -2:
                parent[v] = u
                queue.append(v)
    if parent[goal] == -2:
        return None
    states = [goal]
    while states[-1] != start:
        states.append(int(parent[states[-1]]))
    states.reverse()
    modes = []
    for s in states:
        if s < n_ds:
            modes.append(_ds_mode(graph, s))
        elif s < n_ds + n_l:
            modes.append(SingleSupport(LEFT, FootPose(*map(float, graph.left[s - n_ds]))))
        else:
            modes.append(SingleSupport(RIGHT, FootPose(*map(float, graph.right[s - n_ds - n_l]))))
    return modes


def _find_pair(graph: ModeGraph, li: int, ri: int) -> Optional[int]:
    hits = np.flatnonzero((graph.pair_left == li) & (graph.pair_right == ri))
    return int(hits[0]) if len(hits) else None


def _ds_mode(graph: ModeGraph, k: int) -> DoubleSupport:
    return DoubleSupport(
        left=FootPose(*map(float, graph.left[graph.pair_left[k]])),
        right=FootPose(*map(float, graph.right[graph.pair_right[k]])),
    )


# --- full pipeline ----------------------------------------------------------


def plan(scenario, params: PlanParams, seed) -> PlanResult:
    """Run rounds of explore -> sample -> mode search until solved or the
    round budget is exhausted.  ``seed`` may be an int or a Generator."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    env = scenario.environment
    spec = env.robot
    query = scenario.query
    t0 = time.perf_counter()

    graph = ExplorationGraph(env, query.start_pose(spec), query.goal_pose(spec), params, rng)

    start, goal = query.start, query.goal
    pairs = _PairPool(
        env,
        np.array([[start.left.x, start.left.y, start.left.yaw],
                  [goal.left.x, goal.left.y, goal.left.yaw]]),
        np.array([[start.right.x, start.right.y, start.right.yaw],
                  [goal.right.x, goal.right.y, goal.right.yaw]]),
    )
    n_sigma_used = 0
    discarded = 0

    def result(status, path, route, rounds):
        return PlanResult(
            status=status,
            mode_path=path,
            route=route,
            rounds_used=rounds,
            n_p_used=graph.accepted,
            n_sigma_used=n_sigma_used,
            raw_pose_draws=graph.raw_draws,
            placements_discarded=discarded,
            wall_ms=(time.perf_counter() - t0) * 1000.0,
        )

    for rnd in range(1, params.max_rounds + 1):
        graph.extend_to(params.initial_n_p * 2 ** (rnd - 1))
        routes = graph.routes(params.routes_per_round, params.rho / 4)
        n_sig = params.initial_n_sigma * 2 ** (rnd - 1)
        for route in routes:
            _, sl, sr, drawn, disc = sample_modes(env, route, params.rho, n_sig, rng)
            n_sigma_used += drawn
            discarded += disc
            pairs.extend(sl, sr)
            path = search_modes(pairs.graph())
            if path is not None:
                return result(SOLVED, path, route, rnd)
    return result(BUDGET_EXHAUSTED, None, None, params.max_rounds)
