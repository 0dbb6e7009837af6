"""Acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that pytest prints in its terminal
summary, then asserts. Tolerances are the criterion tolerances verbatim.
"""
import os
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from samin import model, oracle
from samin.baselines import solve_all
from samin.cli import main
from samin.config import parse_scenario_text
from samin.experiments import run_sweep
from samin.optimizer import SolverConfig, mris, stp_solve
from samin.scenario import default_scenario, random_scenario
from support import a_problem, random_context, s_problem

RANDOM_SCENARIOS = 200


def record(number, passed, detail):
    ACCEPTANCE_LINES.append((number, bool(passed), detail))
    print(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
    return passed


@pytest.fixture(scope="module")
def random_solves():
    out = []
    for seed in range(RANDOM_SCENARIOS):
        sc = random_scenario(seed)
        out.append((sc, stp_solve(sc)))
    return out


def _energy(ctx, axis, x):
    return float(oracle.energy_profile(ctx, axis, [x])[0][0])


def test_criterion_1_convexity_and_gradients():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst_curv = 0.0
    worst_grad = 0.0
    for _ in range(1000):
        ctx = random_context(rng)
        for axis, problem, width in (("a", a_problem(ctx), 1.0), ("s", s_problem(ctx), ctx.S)):
            xs = np.linspace(problem.lower, problem.upper, 201)
            E, _ = oracle.energy_profile(ctx, axis, xs)
            second = E[:-2] - 2 * E[1:-1] + E[2:]
            worst_curv = min(worst_curv, float(np.min(second / np.abs(E[1:-1]))))
            x = float(rng.uniform(problem.lower, problem.upper))
            h = 1e-6 * width
            fd = (_energy(ctx, axis, x + h) - _energy(ctx, axis, x - h)) / (2 * h)
            g = problem.derivative(x)
            # relative to the derivative's natural scale, |E|/range, so a
            # vanishing gradient does not turn rounding noise into a failure
            scale = max(abs(g), abs(_energy(ctx, axis, x)) / width)
            worst_grad = max(worst_grad, abs(g - fd) / scale)
    elapsed = time.perf_counter() - start
    ok = worst_curv >= -1e-9 and worst_grad <= 1e-6 and elapsed < 10
    record(1, ok, f"min second difference/|E| = {worst_curv:.2e}, max gradient error = "
                  f"{worst_grad:.2e}, {elapsed:.1f} s")
    assert ok


def test_criterion_2_mris_vs_grid():
    # MRIS searches the latency-derived interval and treats power caps as a
    # post-check, so a context only counts when its whole interval is feasible
    rng = np.random.default_rng(77)
    start = time.perf_counter()
    worst_x = 0.0
    worst_E = -np.inf
    used = skipped = 0
    while used < 100:
        ctx = random_context(rng)
        cases = []
        for axis, problem, width in (("a", a_problem(ctx), 1.0), ("s", s_problem(ctx), ctx.S)):
            grid = oracle.GridSpec(10_001, (axis,), {axis: (problem.lower, problem.upper)})
            _, ok = oracle.energy_profile(ctx, axis, grid.points(axis))
            cases.append((axis, problem, width, grid, ok.all()))
        if not all(c[4] for c in cases):
            skipped += 1
            continue
        used += 1
        for axis, problem, width, grid, _ in cases:
            x = mris(problem)
            x_grid, E_grid = oracle.grid_min_scalar(ctx, axis, grid)
            worst_x = max(worst_x, abs(x - x_grid) / width)
            worst_E = max(worst_E, (_energy(ctx, axis, x) - E_grid) / abs(E_grid))
    elapsed = time.perf_counter() - start
    ok = worst_x <= 1e-3 and worst_E <= 1e-9 and elapsed < 30
    record(2, ok, f"max |x_mris - x_grid|/range = {worst_x:.2e}, max (E_mris - E_grid)/|E| = "
                  f"{worst_E:.2e}, {elapsed:.1f} s ({skipped} contexts with power-capped "
                  f"intervals skipped)")
    assert ok


def test_criterion_3_kkt_tightness(random_solves):
    checked = 0
    worst = 0.0
    for sc, report in random_solves:
        metrics = model.evaluate_plan(sc, report.plan)
        for rho, path in ((report.plan.rho_U, metrics.T_uav_path), (report.plan.rho_L, metrics.T_leo_path)):
            sel = rho > 0
            checked += int(sel.sum())
            if sel.any():
                err = np.abs(path[sel] - sc.T_deadline[sel]) / sc.T_deadline[sel]
                worst = max(worst, float(err.max()))
    ok = worst <= 1e-9 and checked > 0
    record(3, ok, f"{checked} allocations, max relative deadline gap = {worst:.2e}")
    assert ok


def test_criterion_4_descent_and_convergence(random_solves):
    monotone = 0
    converged = 0
    for _, report in random_solves:
        trace = np.asarray(report.objective_trace)
        if np.all(trace[1:] <= trace[:-1] * (1 + 1e-9)):
            monotone += 1
        if report.converged and report.iterations_used <= 20:
            converged += 1
    n = len(random_solves)
    ok = monotone == n and converged >= 0.95 * n
    record(4, ok, f"non-increasing traces {monotone}/{n}, converged {converged}/{n}")
    assert ok


def test_criterion_5_joint_grid():
    sc = default_scenario()
    start = time.perf_counter()
    worse = []
    worst = -np.inf
    for m in range(sc.n_uav):
        for n in range(sc.n_mass):
            single = sc.subset(m, n)
            E_stp = stp_solve(single).objective
            _, E_grid = oracle.joint_grid_min(single)
            gap = (E_stp - E_grid) / E_grid
            worst = max(worst, gap)
            if E_stp > E_grid * (1 + 1e-6):
                worse.append((m, n, gap))
    elapsed = time.perf_counter() - start
    ok = not worse and elapsed < 60
    record(5, ok, f"STP above grid on {len(worse)}/20 single-MASS scenarios, worst relative "
                  f"excess {worst:.2e}, {elapsed:.1f} s")
    assert ok


def test_criterion_6_dominance():
    losses = []
    for seed in range(RANDOM_SCENARIOS):
        reports = solve_all(random_scenario(seed), warm_start=True)
        stp = reports["stp"].objective
        scale = max(abs(r.objective) for r in reports.values())
        for name in ("pomt", "eos", "eacr"):
            if not stp <= reports[name].objective + 1e-9 * scale:
                losses.append((seed, name))
    ok = not losses
    record(6, ok, f"STP beaten on {len(losses)} of {3 * RANDOM_SCENARIOS} scenario-baseline pairs")
    assert ok


def _sweep(variable):
    cfg = parse_scenario_text(f"[sweep]\nvariable = {variable}\nschemes = stp\n", {})
    result = run_sweep(cfg, workers=1)
    return {c: result.series("stp", c)[1] for c in ("E_total", "a_mean", "T_mean")}


def test_criterion_7_trends():
    sc = default_scenario()
    a_grid = np.linspace(0.0, 1.0, 201)
    total = np.zeros_like(a_grid)
    for m in range(sc.n_uav):
        for n in range(sc.n_mass):
            single = sc.subset(m, n)
            _, _, _, _, energy, _ = oracle.tight_energy_grid(single, a_grid, [float(single.S[0, 0])])
            total += energy[:, 0]
    i = int(np.argmin(total))
    part_a = 0 < i < len(a_grid) - 1 and total[i] < total[0] and total[i] < total[-1]

    by_S = _sweep("S")
    part_b = bool(np.all(np.diff(by_S["a_mean"]) <= 0))
    part_c = bool(np.all(np.diff(by_S["E_total"]) > 0))
    by_tU = _sweep("t_U")
    by_tL = _sweep("t_L")
    d = {
        "E(t_U) decreasing": bool(np.all(np.diff(by_tU["E_total"]) < 0)),
        "E(t_L) decreasing": bool(np.all(np.diff(by_tL["E_total"]) < 0)),
        "T(t_U) increasing": bool(np.all(np.diff(by_tU["T_mean"]) > 0)),
        "T(t_L) increasing": bool(np.all(np.diff(by_tL["T_mean"]) > 0)),
    }
    part_d = all(d.values())
    failed_d = [k for k, v in d.items() if not v]
    ok = part_a and part_b and part_c and part_d
    record(7, ok, f"(a) {'ok' if part_a else 'no'} interior minimum at a={a_grid[i]:.3f}; "
                  f"(b) {'ok' if part_b else 'no'}; (c) {'ok' if part_c else 'no'}; "
                  f"(d) {'ok' if part_d else 'failed: ' + ', '.join(failed_d)}"
                  + ("" if part_d else f" [T_mean over t_U = {np.round(by_tU['T_mean'], 4).tolist()}]"))
    assert ok


def test_criterion_8_complexity():
    sizes = [5, 10, 20, 40, 80]
    times = []
    for N in sizes:
        sc = default_scenario(n_per_uav=N)
        config = SolverConfig(T=20)
        best = np.inf
        for _ in range(3):
            start = time.perf_counter()
            stp_solve(sc, config)
            best = min(best, time.perf_counter() - start)
        times.append(best)
    slope = float(np.polyfit(np.log(sizes), np.log(times), 1)[0])
    ok = slope <= 1.2
    record(8, ok, f"log-log slope {slope:.3f} (times {', '.join(f'{t * 1e3:.0f} ms' for t in times)})")
    assert ok


def test_criterion_9_determinism(tmp_path, monkeypatch):
    monkeypatch.delenv("SAMIN_SEED", raising=False)
    cfg = tmp_path / "sweep.ini"
    cfg.write_text("[channel]\nmode = stochastic\nseed = 4\n[sweep]\nvariable = S\n")
    for d in ("one", "two"):
        assert main(["sweep", str(cfg), "--out", str(tmp_path / d)]) == 0
    names = sorted(os.listdir(tmp_path / "one"))
    same = names == sorted(os.listdir(tmp_path / "two")) and all(
        (tmp_path / "one" / f).read_bytes() == (tmp_path / "two" / f).read_bytes() for f in names)
    kinds = sorted({f.rsplit(".", 1)[1] for f in names})
    ok = same and "csv" in kinds and "svg" in kinds
    record(9, ok, f"{len(names)} files ({', '.join(kinds)}) byte-identical across two runs: {same}")
    assert ok
