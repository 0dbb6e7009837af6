"""Command-line entry point: ``samin solve|sweep|compare|plot <file>``."""
from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from samin import model, oracle
from samin.baselines import solve_all
from samin.config import SCHEMES, build_from_config, parse_scenario
from samin.errors import ConfigError, InfeasibleError
from samin.experiments import SweepResult, compare, config_hash, fmt, run_sweep
from samin.optimizer import initial_plan

EXIT_USAGE = 2


def _cmd_solve(args) -> int:
    cfg = parse_scenario(args.config)
    scenario = build_from_config(cfg)
    report = solve_all(scenario, cfg.solver, schemes=("stp",), warm_start=cfg.warm_start)["stp"]
    metrics = model.evaluate_plan(scenario, report.plan)
    bad = {(m, n): reason for m, n, reason in report.infeasible_entries}
    out = open(args.out, "w", encoding="utf-8", newline="\n") if args.out else sys.stdout
    try:
        out.write(f"# config_hash: {config_hash(cfg)}\n# seed: {cfg.seed}\n")
        out.write(f"# E_total: {fmt(metrics.E_total)}\n# iterations: {report.iterations_used}\n")
        out.write(f"# converged: {str(report.converged).lower()}\n")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["m", "n", "a", "s", "rho_U", "rho_L", "E_mass", "T_total", "status"])
        E_mass = metrics.E_mass
        for m in range(scenario.n_uav):
            for n in range(scenario.n_mass):
                writer.writerow([m, n] + [fmt(v[m, n]) for v in (
                    report.plan.a, report.plan.s, report.plan.rho_U, report.plan.rho_L,
                    E_mass, metrics.T_total)] + [bad.get((m, n), "ok")])
    finally:
        if args.out:
            out.close()
    return 3 if bad else 0


def _cmd_sweep(args) -> int:
    cfg = parse_scenario(args.config)
    result = run_sweep(cfg, schemes=tuple(args.schemes) if args.schemes else None)
    csv_path, json_path = result.write(args.out)
    print(csv_path)
    print(json_path)
    if not args.no_plots:
        from samin.plotting import render_plots
        for path in render_plots(result, args.out):
            print(path)
    return 0


def _cmd_compare(args) -> int:
    cmp = compare(parse_scenario(args.config))
    sys.stdout.write(cmp.to_csv() if args.format == "csv" else cmp.to_table())
    return cmp.exit_code


def _cmd_plot(args) -> int:
    from samin.plotting import render_plots
    with open(args.csv, encoding="utf-8") as fh:
        result = SweepResult.from_csv(fh.read())
    for path in render_plots(result, args.out):
        print(path)
    return 0


def regenerate_fixtures(cfg) -> dict:
    """Brute-force reference values for the scenario described by ``cfg``."""
    scenario = build_from_config(cfg)
    geo = model.leo_geometry(cfg.params)
    start = initial_plan(scenario)
    masses = []
    for m in range(scenario.n_uav):
        for n in range(scenario.n_mass):
            single = scenario.subset(m, n)
            ctx = scenario.context(m, n, a=float(start.a[m, n]), s=float(start.s[m, n]),
                                   rho_U=float(start.rho_U[m, n]), rho_L=float(start.rho_L[m, n]))
            entry = {"m": m, "n": n, "distance": float(scenario.distances()[m, n]),
                     "g_U": float(scenario.g_U[m, n])}
            try:
                a_best, E_a = oracle.grid_min_scalar(ctx, "a", oracle.GridSpec(axes=("a",), ranges={"a": (0.0, 1.0)}))
                entry["a_step_grid"] = {"a": a_best, "E": E_a}
            except InfeasibleError as exc:
                entry["a_step_grid"] = {"error": str(exc)}
            try:
                plan, E = oracle.joint_grid_min(single)
                entry["joint_grid"] = {"a": float(plan.a[0, 0]), "s": float(plan.s[0, 0]), "E": E}
            except InfeasibleError as exc:
                entry["joint_grid"] = {"error": str(exc)}
            masses.append(entry)
    return {
        "config_hash": config_hash(cfg),
        "seed": cfg.seed,
        "leo_geometry": {"phi": geo.phi, "d_L": geo.d_L, "v_L": geo.v_L, "T_coverage": geo.T_coverage},
        "masses": masses,
    }


def _cmd_oracle_regen(args) -> int:
    data = regenerate_fixtures(parse_scenario(args.config))
    text = json.dumps(data, indent=2, sort_keys=True, default=lambda o: o.item() if isinstance(o, np.generic) else str(o))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="samin", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="{solve,sweep,compare,plot}")

    p = sub.add_parser("solve", help="optimise one scenario and print the per-MASS plan")
    p.add_argument("config")
    p.add_argument("--out", help="write the plan CSV here instead of stdout")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("sweep", help="run the [sweep] block and write CSV, JSON and SVG files")
    p.add_argument("config")
    p.add_argument("--schemes", nargs="+", choices=SCHEMES)
    p.add_argument("--out", default="results")
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("compare", help="all four schemes on one scenario")
    p.add_argument("config")
    p.add_argument("--format", choices=("table", "csv"), default="table")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("plot", help="render SVG charts from a sweep CSV")
    p.add_argument("csv")
    p.add_argument("--out", default="plots")
    p.set_defaults(func=_cmd_plot)

    # regenerates brute-force fixture values; not listed in --help
    p = sub.add_parser("oracle-regen")
    p.add_argument("config")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_oracle_regen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"samin: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"samin: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
