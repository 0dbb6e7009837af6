"""Layered alternating optimisation of offloading ratio, volume and CPU shares.

One outer sweep visits every MASS and
  1. picks the UAV/LEO split ``a`` by bisection on dE/da,
  2. picks the offloaded volume ``s`` by bisection on dE/ds,
  3. sizes the UAV and LEO CPU shares to make each path meet the deadline exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from samin import model
from samin.errors import InfeasibleError
from samin.scenario import MassContext, OffloadPlan, Scenario

LN2 = math.log(2.0)
# relative slack below which an inverted interval is treated as a single point
COLLAPSE_RTOL = 1e-9


@dataclass(frozen=True)
class ScalarProblem:
    lower: float
    upper: float
    derivative: Callable[[float], float]
    tolerance: float = 1e-6

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class SolverConfig:
    T: int = 20
    delta: float = 1e-6
    rel_tol: float = 1e-5
    optimize_resources: bool = True
    fixed_a: Optional[float] = None


@dataclass
class SolveReport:
    plan: OffloadPlan
    objective_trace: list
    iterations_used: int
    converged: bool
    infeasible_entries: list = field(default_factory=list)
    scheme: str = "stp"
    details: dict = field(default_factory=dict)

    @property
    def objective(self) -> float:
        return self.objective_trace[-1] if self.objective_trace else math.inf


# --- bounds -----------------------------------------------------------------

def _div_or_inf(num, den):
    return math.inf if den == 0 else num / den


def offload_ratio_bounds(ctx: MassContext, rho_U: float, rho_L: float,
                         s: float) -> tuple[float, float]:
    """Range of ``a`` that lets both edge paths meet the deadline at volume ``s``.

    Raises :class:`InfeasibleError` when the range is empty.
    """
    p = ctx.params
    if s <= 0:
        return 0.0, 1.0
    a_high = min(1.0, rho_U * (ctx.T_max - ctx.t_U) / (s * p.c_bit_uav))
    a_low = max(0.0, 1.0 - rho_L * (ctx.T_max - ctx.t_L) / (s * p.c_bit_leo))
    return _checked_interval(a_low, a_high, 1.0, "offload ratio")


def offload_volume_bounds(ctx: MassContext, a: float, rho_U: float,
                          rho_L: float) -> tuple[float, float]:
    p = ctx.params
    if not 0.0 <= a <= 1.0:
        raise ValueError("a must lie in [0, 1]")
    uav_cap = _div_or_inf(rho_U * (ctx.T_max - ctx.t_U), a * p.c_bit_uav)
    leo_cap = _div_or_inf(rho_L * (ctx.T_max - ctx.t_L), (1.0 - a) * p.c_bit_leo)
    s_high = min(ctx.S, uav_cap, leo_cap)
    s_low = max(0.0, ctx.S - ctx.T_max * ctx.rho_local / p.c_bit_local)
    return _checked_interval(s_low, s_high, ctx.S, "offload volume")


def _checked_interval(low, high, scale, what):
    if low > high:
        if low - high <= COLLAPSE_RTOL * max(scale, abs(low)):
            mid = 0.5 * (low + high)
            return mid, mid
        raise InfeasibleError(f"empty {what} interval [{low:.6g}, {high:.6g}]")
    return low, high


# --- derivatives ------------------------------------------------------------

def _leo_airtime(ctx):
    return ctx.t_L - 2.0 * ctx.d_L / ctx.params.c_light


def _compute_slope(power, work, cycles, rho):
    # d/dx of power * x * work * cycles / rho, with the zero-work convention
    if work == 0:
        return 0.0
    if rho <= 0:
        return math.inf
    return power * work * cycles / rho


def energy_gradient_a(ctx: MassContext, a: float) -> float:
    """dE/da at fixed volume and CPU shares (taken from ``ctx``)."""
    p = ctx.params
    s = ctx.s
    tau = _leo_airtime(ctx)
    uav_tx = p.sigma2 * s * LN2 / (ctx.g_U * p.W_U) * 2.0 ** (a * s / (ctx.t_U * p.W_U))
    leo_tx = (ctx.t_L * p.N0 * s * LN2 / (ctx.h_L_sq * tau)
              * 2.0 ** ((1.0 - a) * s / (tau * p.W_L)))
    uav_cpu = _compute_slope(p.P_U, s, p.c_bit_uav, ctx.rho_U)
    leo_cpu = _compute_slope(p.P_L, s, p.c_bit_leo, ctx.rho_L)
    return uav_tx - leo_tx + uav_cpu - leo_cpu


def energy_gradient_s(ctx: MassContext, s: float) -> float:
    """dE/ds at fixed ratio and CPU shares (taken from ``ctx``)."""
    p = ctx.params
    a = ctx.a
    tau = _leo_airtime(ctx)
    local = -p.P_l * p.c_bit_local / ctx.rho_local
    uav_tx = p.sigma2 * a * LN2 / (ctx.g_U * p.W_U) * 2.0 ** (a * s / (ctx.t_U * p.W_U))
    leo_tx = (ctx.t_L * p.N0 * (1.0 - a) * LN2 / (ctx.h_L_sq * tau)
              * 2.0 ** ((1.0 - a) * s / (tau * p.W_L)))
    uav_cpu = _compute_slope(p.P_U, a, p.c_bit_uav, ctx.rho_U)
    leo_cpu = _compute_slope(p.P_L, 1.0 - a, p.c_bit_leo, ctx.rho_L)
    return local + uav_tx + leo_tx + uav_cpu + leo_cpu


def energy_curvature_a(ctx: MassContext, a: float) -> float:
    p = ctx.params
    s = ctx.s
    tau = _leo_airtime(ctx)
    uav = (p.sigma2 / (ctx.g_U * ctx.t_U) * (s * LN2 / p.W_U) ** 2
           * 2.0 ** (a * s / (ctx.t_U * p.W_U)))
    leo = (ctx.t_L * p.N0 / (ctx.h_L_sq * p.W_L) * (s * LN2 / tau) ** 2
           * 2.0 ** ((1.0 - a) * s / (tau * p.W_L)))
    return uav + leo


def energy_curvature_s(ctx: MassContext, s: float) -> float:
    p = ctx.params
    a = ctx.a
    tau = _leo_airtime(ctx)
    uav = (p.sigma2 / (ctx.g_U * ctx.t_U) * (a * LN2 / p.W_U) ** 2
           * 2.0 ** (a * s / (ctx.t_U * p.W_U)))
    leo = (ctx.t_L * p.N0 / (ctx.h_L_sq * p.W_L) * ((1.0 - a) * LN2 / tau) ** 2
           * 2.0 ** ((1.0 - a) * s / (tau * p.W_L)))
    return uav + leo


# --- bisection ----------------------------------------------------------------

def mris(problem: ScalarProblem) -> float:
    """Minimise a convex scalar function on an interval from its derivative.

    Returns a bound when the derivative does not change sign on the interval,
    otherwise bisects until the bracket is no wider than the tolerance and
    returns its midpoint.
    """
    lo, hi = problem.lower, problem.upper
    if lo > hi:
        raise ValueError(f"invalid interval [{lo}, {hi}]")
    d = problem.derivative
    if d(lo) >= 0:
        return lo
    if lo == hi or d(hi) <= 0:
        return hi
    while hi - lo > problem.tolerance:
        mid = 0.5 * (lo + hi)
        g = d(mid)
        if g < 0:
            lo = mid
        elif g > 0:
            hi = mid
        else:
            return mid
    return 0.5 * (lo + hi)


# --- closed-form CPU shares ---------------------------------------------------

def optimal_rho_uav(a: float, s: float, c_m: float, T_max: float, t_U: float) -> float:
    """Smallest UAV CPU share that finishes ``a*s`` bits by the deadline."""
    work = a * s
    if work == 0:
        return 0.0
    if T_max <= t_U:
        raise InfeasibleError("deadline does not exceed the UAV transmission time")
    return work * c_m / (T_max - t_U)


def optimal_rho_leo(a: float, s: float, c_L: float, T_max: float, t_L: float) -> float:
    work = (1.0 - a) * s
    if work == 0:
        return 0.0
    if T_max <= t_L:
        raise InfeasibleError("deadline does not exceed the LEO transmission time")
    return work * c_L / (T_max - t_L)


# --- outer loop ----------------------------------------------------------------

def even_split(scenario: Scenario) -> tuple[np.ndarray, np.ndarray]:
    p = scenario.params
    M, N = scenario.shape
    return (np.full((M, N), p.rho_max_U / N), np.full((M, N), p.rho_max_L / (M * N)))


def initial_plan(scenario: Scenario) -> OffloadPlan:
    """Even CPU split, and the largest volume the two edge shares can finish in time.

    Starting from the largest serviceable volume keeps the first ratio step
    away from the degenerate ``s = 0`` case while its interval stays non-empty.
    """
    p = scenario.params
    rho_U, rho_L = even_split(scenario)
    T = scenario.T_deadline
    s_low = np.maximum(0.0, scenario.S - T * scenario.rho_local / p.c_bit_local)
    edge_bits = (rho_U * np.maximum(T - scenario.t_U, 0.0) / p.c_bit_uav
                 + rho_L * np.maximum(T - scenario.t_L, 0.0) / p.c_bit_leo)
    s = np.maximum(s_low, np.minimum(scenario.S, edge_bits))
    return OffloadPlan(np.full(scenario.shape, 0.5), s, rho_U, rho_L)


def cap_repair(scenario: Scenario, plan: OffloadPlan) -> set:
    """Scale CPU shares down proportionally where a capacity cap is exceeded.

    Returns the set of (m, n) whose share was reduced.
    """
    p = scenario.params
    touched = set()
    for m in range(scenario.n_uav):
        total = plan.rho_U[m].sum()
        if total > p.rho_max_U * (1.0 + model.FEASIBILITY_RTOL):
            plan.rho_U[m] *= p.rho_max_U / total
            touched.update((m, n) for n in np.flatnonzero(plan.rho_U[m] > 0))
    total = plan.rho_L.sum()
    if total > p.rho_max_L * (1.0 + model.FEASIBILITY_RTOL):
        plan.rho_L *= p.rho_max_L / total
        touched.update(tuple(int(i) for i in idx) for idx in np.argwhere(plan.rho_L > 0))
    return touched


def release_idle(plan: OffloadPlan) -> None:
    """Zero the CPU share of any path that carries no bits; costs are unchanged."""
    plan.rho_U[plan.a * plan.s == 0] = 0.0
    plan.rho_L[(1.0 - plan.a) * plan.s == 0] = 0.0


def _solve_mass(ctx: MassContext, config: SolverConfig) -> tuple[float, float, Optional[str]]:
    """One a-step and one s-step for a single MASS. Returns (a, s, failure reason)."""
    delta = config.delta
    a, s = ctx.a, ctx.s
    try:
        a_low, a_high = offload_ratio_bounds(ctx, ctx.rho_U, ctx.rho_L, s)
    except InfeasibleError as exc:
        return a, s, f"ratio: {exc}"
    if config.fixed_a is not None:
        a = config.fixed_a
        if not a_low - COLLAPSE_RTOL <= a <= a_high + COLLAPSE_RTOL:
            return a, s, f"ratio: fixed a={a} outside [{a_low:.6g}, {a_high:.6g}]"
    else:
        a = mris(ScalarProblem(a_low, a_high,
                               lambda x: energy_gradient_a(ctx.with_iterate(s=s), x), delta))
    try:
        s_low, s_high = offload_volume_bounds(ctx, a, ctx.rho_U, ctx.rho_L)
    except InfeasibleError as exc:
        return a, s, f"volume: {exc}"
    s_ctx = ctx.with_iterate(a=a)
    s = mris(ScalarProblem(s_low, s_high, lambda x: energy_gradient_s(s_ctx, x),
                           delta * max(ctx.S, 1.0)))
    return a, s, None


def _sweep(scenario: Scenario, plan: OffloadPlan, config: SolverConfig):
    p = scenario.params
    new = plan.copy()
    failures = {}
    for m in range(scenario.n_uav):
        for n in range(scenario.n_mass):
            ctx = scenario.context(m, n, a=float(plan.a[m, n]), s=float(plan.s[m, n]),
                                   rho_U=float(plan.rho_U[m, n]), rho_L=float(plan.rho_L[m, n]))
            a, s, reason = _solve_mass(ctx, config)
            new.a[m, n], new.s[m, n] = a, s
            if reason:
                failures[(m, n)] = reason
    if config.optimize_resources:
        for m in range(scenario.n_uav):
            for n in range(scenario.n_mass):
                a, s = float(new.a[m, n]), float(new.s[m, n])
                T = float(scenario.T_deadline[m, n])
                try:
                    new.rho_U[m, n] = optimal_rho_uav(a, s, p.c_bit_uav, T, float(scenario.t_U[m, n]))
                except InfeasibleError as exc:
                    failures[(m, n)] = f"uav cpu: {exc}"
                try:
                    new.rho_L[m, n] = optimal_rho_leo(a, s, p.c_bit_leo, T, float(scenario.t_L[m, n]))
                except InfeasibleError as exc:
                    failures[(m, n)] = f"leo cpu: {exc}"
        for key in cap_repair(scenario, new):
            failures.setdefault(key, "capacity cap repair")
    return new, failures


def _static_failures(scenario: Scenario, metrics: model.Metrics) -> dict:
    out = {}
    for m, n in np.argwhere(metrics.violated("distance")):
        out[(int(m), int(n))] = "distance beyond d_max"
    return out


def _post_check(scenario: Scenario, metrics: model.Metrics, failures: dict) -> list:
    entries = dict(failures)
    per_mass = {
        "deadline": "deadline missed",
        "coverage": "beyond LEO coverage window",
        "uav_tx_power": "UAV transmit power cap",
        "leo_tx_power": "LEO transmit power cap",
    }
    for name, reason in per_mass.items():
        for m, n in np.argwhere(metrics.violated(name)):
            entries.setdefault((int(m), int(n)), reason)
    for m in np.flatnonzero(metrics.violated("uav_energy")):
        for n in range(scenario.n_mass):
            entries.setdefault((int(m), n), "UAV energy budget")
    if np.any(metrics.violated("leo_energy")):
        for m in range(scenario.n_uav):
            for n in range(scenario.n_mass):
                entries.setdefault((m, n), "LEO energy budget")
    entries.update(_static_failures(scenario, metrics))
    return sorted((m, n, r) for (m, n), r in entries.items())


def stp_solve(scenario: Scenario, config: SolverConfig = SolverConfig(),
              warm_start: Optional[OffloadPlan] = None) -> SolveReport:
    """Alternating optimisation over (a, s, rho_U, rho_L).

    A sweep is kept only if it does not raise the total energy; the first
    rejected or insufficiently improving sweep ends the loop. With
    ``warm_start`` the supplied plan is the incumbent, so the result is never
    worse than it.
    """
    if warm_start is not None:
        plan = warm_start.copy()
        trace = [model.evaluate_plan(scenario, plan).E_total]
        if not math.isfinite(trace[0]):
            trace = []
    else:
        plan = initial_plan(scenario)
        trace = []
    failures: dict = {}
    converged = False
    used = 0
    for _ in range(config.T):
        candidate, cand_failures = _sweep(scenario, plan, config)
        used += 1
        energy = model.evaluate_plan(scenario, candidate).E_total
        if trace and not energy <= trace[-1]:
            converged = True
            break
        previous = trace[-1] if trace else None
        plan, failures = candidate, cand_failures
        trace.append(energy)
        if previous is not None and previous - energy <= config.rel_tol * abs(previous):
            converged = True
            break
    release_idle(plan)
    metrics = model.evaluate_plan(scenario, plan)
    return SolveReport(plan=plan, objective_trace=trace, iterations_used=used,
                       converged=converged,
                       infeasible_entries=_post_check(scenario, metrics, failures))
