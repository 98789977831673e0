"""Command-line front end.

Subcommands: plan, sweep, bounds, verify (mode-bound | combined), and
scenario build.  Exit codes: 0 success, 2 bound violation detected by a
verify run, 1 usage or runtime error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bounds as bounds_mod
from . import lab
from .planner import PlanParams, plan
from .world import BUILDERS, ScenarioError, load_scenario, save_scenario


def _load(name_or_path: str):
    if name_or_path in BUILDERS:
        return BUILDERS[name_or_path]()
    with open(name_or_path) as f:
        return load_scenario(f.read())


def _float_list(text: str):
    return [float(x) for x in text.split(",") if x.strip()]


def _int_list(text: str):
    return [int(x) for x in text.split(",") if x.strip()]


def _add_budget_args(p):
    p.add_argument("--np", dest="n_p", type=int, default=2000,
                   help="round-1 exploration sample budget (doubles per round)")
    p.add_argument("--nsigma", type=int, default=2000,
                   help="round-1 per-foot placement budget (doubles per round)")
    p.add_argument("--max-rounds", type=int, default=4)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rpgplan",
                                 description="Randomized possibility-graph footstep planner")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="run one planning call")
    p.add_argument("--scenario", required=True,
                   help="scenario JSON path or builder name "
                        f"({', '.join(sorted(BUILDERS))})")
    p.add_argument("--rho", type=float, default=None,
                   help="placement radius in metres (default 2*R_max)")
    p.add_argument("--seed", type=int, default=0)
    _add_budget_args(p)

    p = sub.add_parser("sweep", help="trial batches over a grid of rho values")
    p.add_argument("--scenario", required=True)
    p.add_argument("--rho-list", type=_float_list, default=[0.5, 1, 2, 4, 8],
                   help="comma-separated multipliers of R_max")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="summary CSV path")
    p.add_argument("--trials-out", default=None, help="per-trial CSV path")
    p.add_argument("--no-time", action="store_true",
                   help="record wall_ms as 0 for byte-identical reruns")
    _add_budget_args(p)

    p = sub.add_parser("bounds", help="failure-bound table for a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--np-list", type=_int_list, default=[1000, 2000, 4000, 8000, 16000])
    p.add_argument("--nsigma-list", type=_int_list, default=[1000, 2000, 4000, 8000, 16000])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="CSV path (default: print)")

    p = sub.add_parser("verify", help="empirical bound verification")
    vsub = p.add_subparsers(dest="verify_what", required=True)

    v = vsub.add_parser("mode-bound", help="cylinder-coverage failure vs analytic bound")
    v.add_argument("--scenario", default="stepping-stones")
    v.add_argument("--nsigma-list", type=_int_list, default=[10, 50, 100, 200])
    v.add_argument("--trials", type=int, default=2000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--rho", type=float, default=None)
    v.add_argument("--out", default=None)

    v = vsub.add_parser("combined", help="two-stage union bound vs simulation")
    v.add_argument("--grid", type=_float_list, default=[0.1, 0.3, 0.5, 0.7, 0.9])
    v.add_argument("--trials", type=int, default=10_000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", default=None)

    p = sub.add_parser("scenario", help="scenario file tools")
    ssub = p.add_subparsers(dest="scenario_what", required=True)
    b = ssub.add_parser("build", help="write a builder scenario to JSON")
    b.add_argument("name", choices=sorted(BUILDERS))
    b.add_argument("--out", required=True)
    b.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="builder keyword override, e.g. --set stone_radius=0.2")
    return ap


def _parse_overrides(pairs):
    out = {}
    for item in pairs:
        if "=" not in item:
            raise ValueError(f"expected KEY=VALUE, got '{item}'")
        key, value = item.split("=", 1)
        key = key.strip().replace("-", "_")
        try:
            out[key] = int(value)
        except ValueError:
            try:
                out[key] = float(value)
            except ValueError:
                out[key] = value
        if key == "bar_heights" and isinstance(out[key], str):
            out[key] = tuple(float(x) for x in out[key].split(":"))
    return out


def _default_rho(scenario, rho):
    return 2.0 * scenario.robot.max_step if rho is None else rho


def _cmd_plan(args) -> int:
    scn = _load(args.scenario)
    rho = _default_rho(scn, args.rho)
    params = PlanParams(rho=rho, initial_n_p=args.n_p,
                        initial_n_sigma=args.nsigma, max_rounds=args.max_rounds)
    result = plan(scn, params, args.seed)
    print(f"scenario:  {scn.name}")
    print(f"rho:       {rho:.4f} m ({rho / scn.robot.max_step:.2f} R_max)")
    print(f"status:    {result.status}")
    print(f"rounds:    {result.rounds_used}")
    print(f"samples:   N_P={result.n_p_used} N_sigma={result.n_sigma_used} "
          f"(raw pose draws {result.raw_pose_draws}, "
          f"placements off walkable ground {result.placements_discarded})")
    print(f"wall time: {result.wall_ms:.1f} ms")
    if result.mode_path is not None:
        print(f"mode path: {len(result.mode_path)} modes")
    return 0


def _cmd_sweep(args) -> int:
    scn = _load(args.scenario)
    budgets = lab.Budgets(n_p=args.n_p, n_sigma=args.nsigma, max_rounds=args.max_rounds)
    res = lab.sweep_rho(scn, args.rho_list, budgets, args.trials, args.seed,
                        measure_time=not args.no_time)
    lab.write_summary_csv(res.summary, args.out)
    if args.trials_out:
        lab.write_trials_csv(res.records, args.trials_out)
    for row in res.summary:
        print(f"rho/R_max={row.rho_over_rmax:<6g} success={row.success_rate:.3f} "
              f"median_samples={row.median_samples:.0f} "
              f"normalized={row.normalized_median:.3f}")
    print(f"spearman(rho, median samples) = {res.spearman:.3f}")
    print(f"wrote {args.out}")
    return 0


def _cmd_bounds(args) -> int:
    scn = _load(args.scenario)
    rho = _default_rho(scn, args.rho)
    rows = bounds_mod.bounds_table(scn, rho, args.np_list, args.nsigma_list, seed=args.seed)
    if args.out:
        lab.write_bounds_csv(rows, args.out)
        print(f"wrote {args.out}")
    else:
        print(f"{'bound_name':<22}{'N_P':>8}{'N_sigma':>10}  value")
        for name, n_p, n_sigma, value in rows:
            print(f"{name:<22}{n_p:>8}{n_sigma:>10}  {value:.6g}")
    return 0


def _print_verify(rows, label_names) -> bool:
    any_violation = False
    head = "".join(f"{n:>10}" for n in label_names)
    print(f"{head}{'trials':>8}{'empirical':>11}{'bound':>11}{'flag':>6}")
    for r in rows:
        labels = "".join(f"{v:>10g}" for v in r.label)
        flag = "VIOL" if r.violation else "ok"
        print(f"{labels}{r.trials:>8}{r.empirical:>11.5f}{r.bound:>11.5f}{flag:>6}")
        any_violation |= r.violation
    return any_violation


def _cmd_verify(args) -> int:
    if args.verify_what == "mode-bound":
        scn = _load(args.scenario)
        rows = lab.verify_mode_bound(scn, args.nsigma_list, args.trials, args.seed,
                                     rho=args.rho)
        if args.out:
            lab.write_verify_csv(rows, args.out)
        bad = _print_verify(rows, ["n_sigma"])
    else:
        rows = lab.verify_combined(args.grid, args.trials, args.seed)
        if args.out:
            lab.write_verify_csv(rows, args.out, combined=True)
        bad = _print_verify(rows, ["a_f", "b_f"])
    if bad:
        print("bound violation detected", file=sys.stderr)
        return 2
    print("no violations")
    return 0


def _cmd_scenario(args) -> int:
    overrides = _parse_overrides(args.set)
    scn = BUILDERS[args.name](**overrides)
    with open(args.out, "w") as f:
        f.write(save_scenario(scn))
    print(f"wrote {args.out}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "plan":
            return _cmd_plan(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "bounds":
            return _cmd_bounds(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "scenario":
            return _cmd_scenario(args)
        raise ValueError(f"unknown command {args.command}")
    except (ScenarioError, bounds_mod.DomainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
