"""Deterministic Monte Carlo harness: trial batches, placement-radius sweeps,
and empirical-vs-analytic bound verification, all persisted as CSV.

Determinism contract: every record is a pure function of (scenario, params,
base seed); trial i always uses seed base_seed + i.  Wall-clock time is the
one nondeterministic field, so ``measure_time=False`` records it as zero and
makes repeated runs byte-identical.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from . import bounds as bounds_mod
from .biped import LEFT, RIGHT
from .planner import PlanParams, plan, sample_modes
from .space import make_route, subdivide_path

TRIAL_HEADER = "scenario,rho,rho_over_rmax,seed,outcome,wall_ms,n_p_used,n_sigma_used,path_len"
SUMMARY_HEADER = "scenario,rho_over_rmax,trials,success_rate,median_samples,mean_ms,normalized_median"
VERIFY_MODE_HEADER = "n_sigma,trials,failures,empirical,bound,sigma,violation"
VERIFY_COMBINED_HEADER = "a_f,b_f,trials,failures,empirical,bound,sigma,violation"

OUTCOME_SOLVED = "Solved"
OUTCOME_EXHAUSTED = "BudgetExhausted"


@dataclass(frozen=True)
class Budgets:
    n_p: int = 2000
    n_sigma: int = 2000
    max_rounds: int = 4

    def params(self, rho: float) -> PlanParams:
        return PlanParams(rho=rho, initial_n_p=self.n_p,
                          initial_n_sigma=self.n_sigma, max_rounds=self.max_rounds)


@dataclass(frozen=True)
class TrialRecord:
    scenario: str
    rho: float
    rho_over_rmax: float
    seed: int
    outcome: str
    wall_ms: float
    n_p_used: int
    n_sigma_used: int
    path_len: Optional[int]

    @property
    def solved(self) -> bool:
        return self.outcome == OUTCOME_SOLVED

    @property
    def samples(self) -> int:
        """Samples-to-success, censored at the budget actually spent when the
        trial fails (a failed trial consumed its whole budget)."""
        return self.n_p_used + self.n_sigma_used


@dataclass(frozen=True)
class SweepRow:
    scenario: str
    rho_over_rmax: float
    trials: int
    success_rate: float
    median_samples: float
    mean_ms: float
    normalized_median: float


def run_trials(scenario, rho: float, budgets: Budgets, trials: int, base_seed: int,
               measure_time: bool = True, on_result=None) -> list:
    """One planner run per seed base_seed + i, in index order.

    ``on_result(record, result)``, when given, is called after each trial
    with the trial's record and the full planner result; it exists so
    audits can capture mode paths without a second planning pass.  It has
    no effect on the records or the random stream."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    r_max = scenario.robot.max_step
    params = budgets.params(rho)
    records = []
    for i in range(trials):
        seed = base_seed + i
        result = plan(scenario, params, seed)
        records.append(TrialRecord(
            scenario=scenario.name,
            rho=rho,
            rho_over_rmax=rho / r_max,
            seed=seed,
            outcome=OUTCOME_SOLVED if result.solved else OUTCOME_EXHAUSTED,
            wall_ms=result.wall_ms if measure_time else 0.0,
            n_p_used=result.n_p_used,
            n_sigma_used=result.n_sigma_used,
            path_len=result.path_len,
        ))
        if on_result is not None:
            on_result(records[-1], result)
    return records


def summarize(records: Sequence[TrialRecord]) -> list:
    """Per-(scenario, rho) summary rows; normalized_median is scaled by the
    per-scenario minimum so each scenario's best point sits at 1.0."""
    keys = []
    for r in records:
        k = (r.scenario, r.rho_over_rmax)
        if k not in keys:
            keys.append(k)
    raw = {}
    for scen, ratio in keys:
        grp = [r for r in records if (r.scenario, r.rho_over_rmax) == (scen, ratio)]
        raw[(scen, ratio)] = (
            len(grp),
            sum(r.solved for r in grp) / len(grp),
            float(np.median([r.samples for r in grp])),
            float(np.mean([r.wall_ms for r in grp])),
        )
    mins = {}
    for (scen, _), (_, _, med, _) in raw.items():
        mins[scen] = min(mins.get(scen, math.inf), med)
    rows = []
    for scen, ratio in keys:
        n, rate, med, ms = raw[(scen, ratio)]
        rows.append(SweepRow(
            scenario=scen, rho_over_rmax=ratio, trials=n, success_rate=rate,
            median_samples=med, mean_ms=ms,
            normalized_median=med / mins[scen] if mins[scen] > 0 else 1.0,
        ))
    return rows


@dataclass(frozen=True)
class SweepResult:
    records: list
    summary: list
    spearman: float


def sweep_rho(scenario, multipliers: Sequence[float], budgets: Budgets, trials: int,
              base_seed: int, measure_time: bool = True, on_result=None) -> SweepResult:
    """Trials at rho = multiplier * R_max for each multiplier, plus the
    Spearman rank correlation between rho and median samples-to-success."""
    if any(m <= 0 for m in multipliers):
        raise ValueError("rho multipliers must be positive")
    r_max = scenario.robot.max_step
    records = []
    for mult in multipliers:
        records.extend(run_trials(scenario, mult * r_max, budgets, trials,
                                  base_seed, measure_time=measure_time,
                                  on_result=on_result))
    summary = summarize(records)
    rho_vals = [row.rho_over_rmax for row in summary]
    medians = [row.median_samples for row in summary]
    if len(summary) >= 2 and len(set(medians)) > 1:
        spearman = float(stats.spearmanr(rho_vals, medians).statistic)
    else:
        spearman = float("nan")  # rank correlation undefined on a constant
    return SweepResult(records=records, summary=summary, spearman=spearman)


# --- bound verification -----------------------------------------------------


@dataclass(frozen=True)
class VerifyRow:
    label: tuple
    trials: int
    failures: int
    empirical: float
    bound: float
    sigma: float
    violation: bool


def _slack(bound: float, trials: int) -> float:
    return math.sqrt(max(bound * (1.0 - bound), 0.0) / trials)


def verify_mode_bound(scenario, n_sigma_list: Sequence[int], trials: int,
                      base_seed: int, rho: Optional[float] = None) -> list:
    """Empirical frequency of "some truth cylinder got no placement sample"
    versus the analytic mode-failure bound.

    Placements are drawn with the planner's own sampler over the disk union
    along the straight start-goal route.  Cylinder i must be hit by the draws
    of the foot that walks it (alternating left/right along the route, left
    first), mirroring one-foothold-per-swing solutions.  A row is flagged
    when empirical > bound + 3 binomial sigma."""
    if not scenario.truth_cylinders:
        raise ValueError(f"scenario '{scenario.name}' carries no truth cylinders")
    env = scenario.environment
    spec = env.robot
    if rho is None:
        rho = 2.0 * spec.max_step
    m, r_m, dth = bounds_mod.truth_cylinder_stats(scenario)
    route = make_route(subdivide_path(
        [scenario.query.start_pose(spec), scenario.query.goal_pose(spec)], rho / 4.0))
    cyls = scenario.truth_cylinders
    centers = np.array([[c.cx, c.cy] for c in cyls])
    radii = np.array([c.radius for c in cyls])
    rows = []
    area = None
    for n_sigma in n_sigma_list:
        failures = 0
        for t in range(trials):
            rng = np.random.default_rng(base_seed + t)
            region, left, right, _, _ = sample_modes(env, route, rho, int(n_sigma), rng)
            area = region.total_area
            if _any_cylinder_missed(cyls, centers, radii, left, right):
                failures += 1
        b = bounds_mod.mode_failure_bound(m, bounds_mod.beta_m(r_m, dth, area), int(n_sigma))
        emp = failures / trials
        sig = _slack(b, trials)
        rows.append(VerifyRow(
            label=(int(n_sigma),), trials=trials, failures=failures,
            empirical=emp, bound=b, sigma=sig, violation=emp > b + 3 * sig,
        ))
    return rows


def _any_cylinder_missed(cyls, centers, radii, left, right) -> bool:
    for i, c in enumerate(cyls):
        placements = left if i % 2 == 0 else right
        if len(placements) == 0:
            return True
        d2 = (placements[:, 0] - centers[i, 0]) ** 2 + (placements[:, 1] - centers[i, 1]) ** 2
        inside = d2 <= radii[i] ** 2
        if c.yaw_span < 2 * math.pi - 1e-12:
            inside &= (placements[:, 2] - c.yaw_lo) % (2 * math.pi) <= c.yaw_span
        if not inside.any():
            return True
    return False


def verify_combined(grid: Sequence[float], trials: int, base_seed: int) -> list:
    """Simulate the dependent two-stage process at its failure-rate boundary:
    stage A fails with probability a_f; stage B runs only if A succeeded and
    then fails with probability b_f.  Joint failure must stay within
    min(1, a_f + b_f) + 3 sigma for every (a_f, b_f) pair in grid x grid."""
    rows = []
    for ai, a_f in enumerate(grid):
        for bi, b_f in enumerate(grid):
            rng = np.random.default_rng(base_seed + 1000 * ai + bi)
            u = rng.random(trials)
            v = rng.random(trials)
            failed = (u < a_f) | (v < b_f)
            failures = int(failed.sum())
            b = bounds_mod.combined_bound(float(a_f), float(b_f))
            emp = failures / trials
            sig = _slack(b, trials)
            rows.append(VerifyRow(
                label=(float(a_f), float(b_f)), trials=trials, failures=failures,
                empirical=emp, bound=b, sigma=sig, violation=emp > b + 3 * sig,
            ))
    return rows


# --- CSV persistence --------------------------------------------------------


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float):
        if x == int(x) and abs(x) < 1e15:
            return str(int(x))
        return format(x, ".10g")
    return str(x)


def write_trials_csv(records: Sequence[TrialRecord], path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(TRIAL_HEADER.split(","))
        for r in records:
            w.writerow([r.scenario, _fmt(r.rho), _fmt(r.rho_over_rmax), _fmt(r.seed),
                        r.outcome, _fmt(r.wall_ms), _fmt(r.n_p_used),
                        _fmt(r.n_sigma_used), _fmt(r.path_len)])


def write_summary_csv(rows: Sequence[SweepRow], path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(SUMMARY_HEADER.split(","))
        for r in rows:
            w.writerow([r.scenario, _fmt(r.rho_over_rmax), _fmt(r.trials),
                        _fmt(r.success_rate), _fmt(r.median_samples),
                        _fmt(r.mean_ms), _fmt(r.normalized_median)])


def write_verify_csv(rows: Sequence[VerifyRow], path, combined: bool = False) -> None:
    header = VERIFY_COMBINED_HEADER if combined else VERIFY_MODE_HEADER
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header.split(","))
        for r in rows:
            w.writerow([*map(_fmt, r.label), _fmt(r.trials), _fmt(r.failures),
                        _fmt(r.empirical), _fmt(r.bound), _fmt(r.sigma),
                        _fmt(r.violation)])


def write_bounds_csv(rows, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["bound_name", "N_P", "N_sigma", "value"])
        for name, n_p, n_sigma, value in rows:
            w.writerow([name, _fmt(n_p), _fmt(n_sigma), _fmt(value)])
