"""Comparison schemes: paired offloading (POMT), equal split (EOS), even CPU split (EACR)."""
from __future__ import annotations

import dataclasses
from typing import Optional

import numpy as np

from samin import model
from samin.optimizer import (
    SolveReport,
    SolverConfig,
    _post_check,
    cap_repair,
    optimal_rho_leo,
    optimal_rho_uav,
    stp_solve,
)
from samin.scenario import OffloadPlan, Scenario

# (a, share of S offloaded) for each pure mode
POMT_MODES = {"local": (0.0, 0.0), "uav": (1.0, 1.0), "leo": (0.0, 1.0)}


def _tight_resources(scenario: Scenario, plan: OffloadPlan) -> dict:
    """Fill rho_U/rho_L from the deadline-tight closed forms; returns failures."""
    p = scenario.params
    failures = {}
    for m in range(scenario.n_uav):
        for n in range(scenario.n_mass):
            a, s = float(plan.a[m, n]), float(plan.s[m, n])
            T = float(scenario.T_deadline[m, n])
            try:
                plan.rho_U[m, n] = optimal_rho_uav(a, s, p.c_bit_uav, T, float(scenario.t_U[m, n]))
                plan.rho_L[m, n] = optimal_rho_leo(a, s, p.c_bit_leo, T, float(scenario.t_L[m, n]))
            except Exception as exc:  # InfeasibleError; keep going for the other MASSs
                failures[(m, n)] = str(exc)
    return failures


def _finish(scenario: Scenario, plan: OffloadPlan, failures: dict, scheme: str) -> SolveReport:
    for key in cap_repair(scenario, plan):
        failures.setdefault(key, "capacity cap repair")
    metrics = model.evaluate_plan(scenario, plan)
    return SolveReport(plan=plan, objective_trace=[metrics.E_total], iterations_used=1,
                       converged=True, infeasible_entries=_post_check(scenario, metrics, failures),
                       scheme=scheme)


def pomt_solve(scenario: Scenario) -> SolveReport:
    """Each MASS runs its whole task on exactly one executor: itself, its UAV or the LEO."""
    p = scenario.params
    shape = scenario.shape
    energies, ok, plans = {}, {}, {}
    for mode, (a, share) in POMT_MODES.items():
        plan = OffloadPlan(np.full(shape, a), scenario.S * share, np.zeros(shape), np.zeros(shape))
        _tight_resources(scenario, plan)
        terms = model.cost_terms(p, scenario.S, scenario.rho_local, scenario.t_U, scenario.t_L,
                                 scenario.g_U, scenario.h_L_sq, scenario.d_L,
                                 plan.a, plan.s, plan.rho_U, plan.rho_L)
        energy = model.total_energy(terms)
        feasible = (
            (terms["T_total"] <= scenario.T_deadline * (1 + model.FEASIBILITY_RTOL))
            & (terms["p_U"] <= p.P_max_U) & (terms["p_L"] <= p.P_max_L)
            & np.isfinite(energy)
        )
        energies[mode], ok[mode], plans[mode] = energy, feasible, plan

    modes = list(POMT_MODES)
    stacked = np.stack([np.where(ok[k], energies[k], np.inf) for k in modes])
    any_ok = np.isfinite(stacked).any(axis=0)
    fallback = np.stack([energies[k] for k in modes])
    choice = np.where(any_ok, np.argmin(stacked, axis=0),
                      np.argmin(np.nan_to_num(fallback, nan=np.inf), axis=0))
    plan = OffloadPlan.zeros(shape)
    for idx, mode in enumerate(modes):
        sel = choice == idx
        for name in ("a", "s", "rho_U", "rho_L"):
            getattr(plan, name)[sel] = getattr(plans[mode], name)[sel]
    failures = {(int(m), int(n)): "no single executor meets the deadline"
                for m, n in np.argwhere(~any_ok)}
    report = _finish(scenario, plan, failures, "pomt")
    report.details["modes"] = np.array(modes, dtype=object)[choice]
    return report


def eos_solve(scenario: Scenario) -> SolveReport:
    """MASS, UAV and LEO each process a third of every task."""
    shape = scenario.shape
    plan = OffloadPlan(np.full(shape, 0.5), scenario.S * (2.0 / 3.0),
                       np.zeros(shape), np.zeros(shape))
    failures = _tight_resources(scenario, plan)
    return _finish(scenario, plan, failures, "eos")


def eacr_solve(scenario: Scenario, config: SolverConfig = SolverConfig()) -> SolveReport:
    """Even CPU split kept fixed; only the ratio and volume steps run."""
    report = stp_solve(scenario, dataclasses.replace(config, optimize_resources=False))
    report.scheme = "eacr"
    return report


BASELINES = {"pomt": pomt_solve, "eos": eos_solve, "eacr": eacr_solve}


def _rank(report: SolveReport):
    return (len(report.infeasible_entries) > 0, report.objective)


def stp_with_warm_starts(scenario: Scenario, config: SolverConfig = SolverConfig(),
                         baselines: Optional[dict] = None) -> SolveReport:
    """Cold-start STP plus STP warm-started from every baseline plan; best one wins.

    Feasible reports beat infeasible ones, then lower energy wins. Because a
    warm-started run never ends above its starting plan, the result is at
    most the energy of every feasible baseline.
    """
    if baselines is None:
        baselines = {name: fn(scenario, config) if name == "eacr" else fn(scenario)
                     for name, fn in BASELINES.items()}
    best = stp_solve(scenario, config)
    for base in baselines.values():
        if config.fixed_a is not None and not np.all(
                (base.plan.a == config.fixed_a) | (base.plan.s == 0)):
            continue
        candidate = stp_solve(scenario, config, warm_start=base.plan)
        if _rank(candidate) < _rank(best):
            best = candidate
    best.scheme = "stp"
    return best


def solve_all(scenario: Scenario, config: SolverConfig = SolverConfig(),
              schemes=("stp", "pomt", "eos", "eacr"), warm_start: bool = True) -> dict:
    """Run the requested schemes on one scenario."""
    reports = {}
    baselines = {}
    for name in ("pomt", "eos", "eacr"):
        if name in schemes or ("stp" in schemes and warm_start):
            fn = BASELINES[name]
            baselines[name] = fn(scenario, config) if name == "eacr" else fn(scenario)
    if "stp" in schemes:
        reports["stp"] = (stp_with_warm_starts(scenario, config, baselines) if warm_start
                          else stp_solve(scenario, config))
    for name in schemes:
        if name != "stp":
            reports[name] = baselines[name]
    return reports


def mean_latency(scenario: Scenario, report: SolveReport) -> tuple[float, float]:
    T = model.evaluate_plan(scenario, report.plan).T_total
    return float(np.mean(T)), float(np.max(T))


