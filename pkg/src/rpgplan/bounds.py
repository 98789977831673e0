"""Closed-form failure-probability bounds for the sampling pipeline, plus the
numerical estimators that feed them.

Every bound is an upper bound on a true failure probability, so outputs are
clamped to [0, 1]; values that clamp at 1 are valid but vacuous.  Powers of
the form (1 - x)^N are evaluated as exp(N*log1p(-x)) so tiny x with huge N
keeps full relative precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import biped
from .space import pose_from_array, sample_poses

PI3_OVER_6 = math.pi**3 / 6.0


class DomainError(ValueError):
    """An input leaves the regime where the bound statement applies."""


def _pow1m(x: float, n: float) -> float:
    """(1 - x)^n for x in [0, 1], precise for tiny x and large n."""
    if x >= 1.0:
        return 1.0 if n == 0 else 0.0
    if x <= 0.0:
        return 1.0
    return math.exp(n * math.log1p(-x))


def beta_m(r_m: float, delta_theta_m: float, area_f: float) -> float:
    """Per-sample probability that one uniform (x, y, yaw) draw over the
    sampling region lands inside the smallest required foothold cylinder.

    Exact value r_m^2 * delta_theta_m / (2 * area_f), valid only while the
    sampling space is at least as large as the cylinder (beta_m <= 1)."""
    if min(r_m, delta_theta_m, area_f) <= 0:
        raise DomainError("beta_m inputs must be positive")
    value = r_m * r_m * delta_theta_m / (2.0 * area_f)
    if value > 1.0 + 1e-12:
        raise DomainError(
            "sampling region smaller than the foothold cylinder "
            f"(beta_m = {value:.3g} > 1)"
        )
    return min(value, 1.0)


def mode_failure_bound(m: int, beta: float, n_sigma: int) -> float:
    """Probability bound that some of the m required foothold cylinders
    receives no hit among n_sigma draws: min(1, m*(1-beta)^n_sigma)."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if not (0.0 < beta <= 1.0):
        raise ValueError("beta must lie in (0, 1]")
    if n_sigma < 0:
        raise ValueError("n_sigma must be nonnegative")
    return min(1.0, m * _pow1m(beta, n_sigma))


def epsilon_for(clearance: float, rho: float) -> float:
    """Vertex spacing that keeps route discretization compatible with both
    the route's clearance and the placement radius: min(R/2, rho/4)."""
    if clearance <= 0 or rho <= 0:
        raise DomainError("clearance and rho must be positive")
    return min(clearance / 2.0, rho / 4.0)


def exploration_failure_bound(length: float, epsilon: float, vol_cn: float, n_p: int) -> float:
    """Probability bound that n_p uniform pose draws miss some epsilon-ball
    along a route of the given arclength:
    min(1, (L/eps)*(1 - pi^3 eps^6 / (6 |C_N|))^n_p)."""
    if epsilon <= 0 or length <= 0 or vol_cn <= 0:
        raise DomainError("length, epsilon and vol_cn must be positive")
    ball = PI3_OVER_6 * epsilon**6
    if ball > vol_cn * (1 + 1e-12):
        raise DomainError("epsilon-ball volume exceeds the manifold volume")
    if n_p < 0:
        raise ValueError("n_p must be nonnegative")
    return min(1.0, (length / epsilon) * _pow1m(ball / vol_cn, n_p))


def combined_bound(a_f: float, b_f: float) -> float:
    """Union bound for a dependent two-stage process: min(1, a_f + b_f)."""
    if not (0.0 <= a_f <= 1.0 and 0.0 <= b_f <= 1.0):
        raise ValueError("a_f and b_f must be probabilities")
    return min(1.0, a_f + b_f)


def area_f_upper_bound(length: float, epsilon: float, rho: float) -> float:
    """Upper bound on the area of the union of radius-rho disks spaced at
    epsilon along a route: min((L/eps)*pi*rho^2, 4*L*pi*rho).

    The second term assumes eps = rho/4 (the spacing actually used)."""
    if length <= 0 or epsilon <= 0 or rho <= 0:
        raise DomainError("length, epsilon and rho must be positive")
    return min((length / epsilon) * math.pi * rho * rho, 4.0 * length * math.pi * rho)


def mode_convergence_bound(m: int, r_m: float, delta_theta_m: float,
                           length: float, rho: float, n_sigma: int) -> float:
    """Mode-failure bound with the area replaced by its rho-dependent upper
    bound 4*L*pi*rho: min(1, m*(1 - r_m^2 dtheta/(8 L pi rho))^n_sigma).

    Increasing in rho at fixed n_sigma, which is why small rho converges
    faster; rho still needs to be at least twice the step reach so the disks
    cover every placement any route vertex could require."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if min(r_m, delta_theta_m, length, rho) <= 0:
        raise DomainError("r_m, delta_theta_m, length and rho must be positive")
    x = r_m * r_m * delta_theta_m / (8.0 * length * math.pi * rho)
    return min(1.0, m * _pow1m(min(x, 1.0), n_sigma))


@dataclass(frozen=True)
class BoundInputs:
    """Everything the combined bound consumes.

    m counts the single-support modes of one hypothetical solution; r_m and
    delta_theta_m are the radius and yaw span of its tightest foothold
    cylinder; area_f is the placement-region area; length/epsilon/vol_cn/
    clearance describe the exploration side; h_m (largest placement-to-vertex
    distance of the hypothetical solution) is carried for reporting only."""

    m: int
    r_m: float
    delta_theta_m: float
    area_f: float
    length: float
    epsilon: float
    vol_cn: float
    clearance: float
    rho: float
    n_p: int
    n_sigma: int
    h_m: Optional[float] = None

    def exploration_bound(self) -> float:
        return exploration_failure_bound(self.length, self.epsilon, self.vol_cn, self.n_p)

    def mode_bound(self) -> float:
        return mode_failure_bound(self.m, beta_m(self.r_m, self.delta_theta_m, self.area_f), self.n_sigma)

    def combined(self) -> float:
        return combined_bound(self.exploration_bound(), self.mode_bound())


def combined_exponential_form(inputs: BoundInputs) -> tuple:
    """(alpha, beta) with alpha*exp(-beta) an upper bound on the combined
    two-stage failure probability.

    alpha = L/eps + m;
    beta = min(pi^3 eps^6 n_p / (6 vol_cn), r_m^2 dtheta n_sigma / (2 area_f)).
    Dominates the tight product form via 1 - x <= exp(-x)."""
    bm = beta_m(inputs.r_m, inputs.delta_theta_m, inputs.area_f)
    ball = PI3_OVER_6 * inputs.epsilon**6
    if inputs.epsilon <= 0 or inputs.length <= 0 or inputs.vol_cn <= 0:
        raise DomainError("length, epsilon and vol_cn must be positive")
    if ball > inputs.vol_cn * (1 + 1e-12):
        raise DomainError("epsilon-ball volume exceeds the manifold volume")
    alpha = inputs.length / inputs.epsilon + inputs.m
    beta = min(ball / inputs.vol_cn * inputs.n_p, bm * inputs.n_sigma)
    return alpha, beta


# --- numerical estimators ---------------------------------------------------


@dataclass(frozen=True)
class VolumeEstimate:
    """Monte Carlo estimate of the necessary-condition manifold's 6-volume,
    with a binomial 95% interval."""

    volume: float
    lo: float
    hi: float
    accept_fraction: float
    draws: int


def estimate_vol_cn(env, n: int, rng: np.random.Generator) -> VolumeEstimate:
    """|explore bounds| times the accepted fraction of n uniform draws."""
    if n <= 0:
        raise ValueError("n must be positive")
    draws = sample_poses(env.explore_bounds, rng, n)
    ok = biped.necessary_check_batch(env, draws)
    p = float(ok.mean())
    total = env.explore_bounds.volume6
    half = 1.96 * math.sqrt(max(p * (1.0 - p), 0.0) / n)
    return VolumeEstimate(
        volume=p * total,
        lo=max(p - half, 0.0) * total,
        hi=min(p + half, 1.0) * total,
        accept_fraction=p,
        draws=n,
    )


def estimate_route_clearance(env, poses, rng: np.random.Generator,
                             probes_per_shell: int = 64, r_max: float = 2.0) -> float:
    """Probe-based estimate of the minimum distance from a pose path to the
    boundary of the necessary-condition manifold.

    For each pose, random unit directions (in the weighted pose metric) are
    scanned over geometrically growing shell radii; the first radius whose
    probes contain an invalid pose caps that pose's clearance.  This is a
    sampling estimate and can overestimate; it is reporting plumbing, not
    part of any guarantee."""
    from .space import DEFAULT_ROT_WEIGHT

    radii = []
    r = 0.01
    while r < r_max:
        radii.append(r)
        r *= 1.35
    radii.append(r_max)
    w = DEFAULT_ROT_WEIGHT
    best = r_max
    arrs = np.array([p.as_array() for p in poses])
    for pose in arrs:
        for r in radii:
            if r >= best:
                break
            u = rng.normal(size=(probes_per_shell, 6))
            u /= np.linalg.norm(u, axis=1, keepdims=True)
            probes = pose[None, :] + r * np.column_stack([u[:, :3], u[:, 3:] / w])
            inside = np.array([env.explore_bounds.contains(pose_from_array(q)) for q in probes])
            ok = np.zeros(len(probes), dtype=bool)
            if inside.any():
                ok[inside] = biped.necessary_check_batch(env, probes[inside])
            if not ok.all():
                best = min(best, r)
                break
    return best


# --- scenario-level table ---------------------------------------------------


def truth_cylinder_stats(scenario) -> tuple:
    """(m, r_m, delta_theta_m) from a scenario's truth cylinders."""
    cyls = scenario.truth_cylinders
    if not cyls:
        raise ValueError(f"scenario '{scenario.name}' carries no truth cylinders")
    m = len(cyls)
    r_m = min(c.radius for c in cyls)
    dth = min(c.yaw_span for c in cyls)
    return m, r_m, dth


def inputs_for_scenario(scenario, rho: float, n_p: int, n_sigma: int,
                        seed: int = 0, vol_draws: int = 200_000) -> BoundInputs:
    """Assemble BoundInputs for a truth-annotated scenario: the route is the
    straight start-goal segment, the region area is the polygonized disk
    union along it, vol_cn and clearance are Monte Carlo estimates."""
    from .planner import disk_union_area
    from .space import make_route, subdivide_path

    env = scenario.environment
    spec = env.robot
    m, r_m, dth = truth_cylinder_stats(scenario)
    start = scenario.query.start_pose(spec)
    goal = scenario.query.goal_pose(spec)
    rng = np.random.default_rng(seed)
    vol = estimate_vol_cn(env, vol_draws, rng)
    poses = subdivide_path([start, goal], rho / 4.0)
    clearance = estimate_route_clearance(env, poses, rng)
    route = make_route(poses)
    eps = epsilon_for(clearance, rho)
    area = disk_union_area(np.asarray(route.projected_xy), rho)
    return BoundInputs(
        m=m, r_m=r_m, delta_theta_m=dth, area_f=area,
        length=route.length, epsilon=eps, vol_cn=vol.volume,
        clearance=clearance, rho=rho, n_p=n_p, n_sigma=n_sigma,
    )


def bounds_table(scenario, rho: float, np_list, nsigma_list,
                 seed: int = 0, vol_draws: int = 200_000) -> list:
    """Rows of (bound_name, n_p, n_sigma, value) over the budget grid, with
    scalar inputs reported as rows at n_p = n_sigma = 0."""
    base = inputs_for_scenario(scenario, rho, 0, 0, seed=seed, vol_draws=vol_draws)
    bm = beta_m(base.r_m, base.delta_theta_m, base.area_f)
    rows = [
        ("beta_m", 0, 0, bm),
        ("epsilon", 0, 0, base.epsilon),
        ("route_length", 0, 0, base.length),
        ("area_f", 0, 0, base.area_f),
        ("area_f_upper", 0, 0, area_f_upper_bound(base.length, base.epsilon, rho)),
        ("vol_cn_estimate", 0, 0, base.vol_cn),
        ("clearance_estimate", 0, 0, base.clearance),
        ("alpha", 0, 0, base.length / base.epsilon + base.m),
    ]
    for n_p in np_list:
        for n_sigma in nsigma_list:
            inp = BoundInputs(
                m=base.m, r_m=base.r_m, delta_theta_m=base.delta_theta_m,
                area_f=base.area_f, length=base.length, epsilon=base.epsilon,
                vol_cn=base.vol_cn, clearance=base.clearance, rho=rho,
                n_p=int(n_p), n_sigma=int(n_sigma),
            )
            a_f = inp.exploration_bound()
            b_f = inp.mode_bound()
            alpha, beta = combined_exponential_form(inp)
            rows.append(("exploration_failure", inp.n_p, inp.n_sigma, a_f))
            rows.append(("mode_failure", inp.n_p, inp.n_sigma, b_f))
            rows.append(("combined", inp.n_p, inp.n_sigma, combined_bound(a_f, b_f)))
            rows.append(("exponential_form", inp.n_p, inp.n_sigma, min(1.0, alpha * math.exp(-beta))))
    return rows
