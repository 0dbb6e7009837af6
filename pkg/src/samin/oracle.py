"""Brute-force reference minimisers.

Built only from :mod:`samin.model`; nothing here may import the optimiser,
so the checks the test suite runs against it stay independent.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from samin import model
from samin.errors import InfeasibleError
from samin.scenario import MassContext, OffloadPlan, Scenario

AXES = ("a", "s", "rho_U", "rho_L")


@dataclass(frozen=True)
class GridSpec:
    points_per_axis: int = 10_001
    axes: tuple = ("a",)
    ranges: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.points_per_axis < 2:
            raise ValueError("points_per_axis must be at least 2")
        for ax in self.axes:
            if ax not in AXES:
                raise ValueError(f"unknown axis {ax!r}")
            lo, hi = self.ranges.get(ax, (0.0, 1.0))
            if lo > hi:
                raise ValueError(f"range for {ax} is reversed")

    def points(self, axis: str) -> np.ndarray:
        lo, hi = self.ranges[axis]
        return np.linspace(lo, hi, self.points_per_axis)


def _feasible_mask(ctx: MassContext, terms: dict) -> np.ndarray:
    p = ctx.params
    T = ctx.T_max * (1.0 + model.FEASIBILITY_RTOL)
    E = model.total_energy(terms)
    return (
        (terms["T_total"] <= T)
        & (terms["p_U"] <= p.P_max_U * (1.0 + model.FEASIBILITY_RTOL))
        & (terms["p_L"] <= p.P_max_L * (1.0 + model.FEASIBILITY_RTOL))
        & np.isfinite(E)
    )


def energy_profile(ctx: MassContext, axis: str, values) -> tuple[np.ndarray, np.ndarray]:
    """Energy of one MASS as ``axis`` sweeps ``values``; other blocks come from ``ctx``."""
    iterate = {"a": ctx.a, "s": ctx.s, "rho_U": ctx.rho_U, "rho_L": ctx.rho_L}
    iterate[axis] = np.asarray(values, dtype=float)
    terms = model.context_terms(ctx, **iterate)
    return model.total_energy(terms), _feasible_mask(ctx, terms)


def grid_argmin(xs, values, feasible) -> tuple[float, float]:
    """Smallest feasible value on a 1-D grid; ties go to the lowest index."""
    feasible = np.asarray(feasible, dtype=bool)
    if not feasible.any():
        raise InfeasibleError("no feasible grid point")
    masked = np.where(feasible, values, np.inf)
    i = int(np.argmin(masked))
    return float(xs[i]), float(masked[i])


def grid_min_scalar(ctx: MassContext, axis: str, grid: GridSpec) -> tuple[float, float]:
    """Best feasible grid point along one axis; ties go to the lowest index."""
    xs = grid.points(axis)
    energy, ok = energy_profile(ctx, axis, xs)
    if not ok.any():
        raise InfeasibleError(f"no feasible grid point along {axis}")
    return grid_argmin(xs, energy, ok)


def tight_cpu(ctx: MassContext, a, s) -> tuple[np.ndarray, np.ndarray]:
    """Deadline-tight CPU shares, recomputed here from the latency model."""
    p = ctx.params
    a = np.asarray(a, dtype=float)
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        rho_U = np.where(a * s > 0, a * s * p.c_bit_uav / (ctx.T_max - ctx.t_U), 0.0)
        rho_L = np.where((1 - a) * s > 0, (1 - a) * s * p.c_bit_leo / (ctx.T_max - ctx.t_L), 0.0)
    return rho_U, rho_L


def tight_energy_grid(scenario_1mass: Scenario, a_values, s_values):
    """Energy and feasibility over the (a, s) grid with deadline-tight CPU shares."""
    if scenario_1mass.shape != (1, 1):
        raise ValueError("joint grid search needs a single-MASS scenario")
    p = scenario_1mass.params
    ctx = scenario_1mass.context(0, 0)
    A, S = np.meshgrid(np.asarray(a_values, float), np.asarray(s_values, float), indexing="ij")
    rho_U, rho_L = tight_cpu(ctx, A, S)
    terms = model.context_terms(ctx, A, S, rho_U, rho_L)
    energy = model.total_energy(terms)
    ok = _feasible_mask(ctx, terms)
    ok &= rho_U <= p.rho_max_U * (1.0 + model.FEASIBILITY_RTOL)
    ok &= rho_L <= p.rho_max_L * (1.0 + model.FEASIBILITY_RTOL)
    ok &= terms["E_cpu_U"] <= p.E_max_U
    ok &= terms["E_cpu_L"] <= p.E_max_L
    ok &= terms["T_leo_path"] <= scenario_1mass.T_coverage
    return A, S, rho_U, rho_L, energy, ok


def joint_grid_min(scenario_1mass: Scenario, grid: GridSpec = None) -> tuple[OffloadPlan, float]:
    """Exhaustive (a, s) search for one MASS, CPU shares sized to the deadline."""
    ctx = scenario_1mass.context(0, 0)
    if grid is None:
        grid = GridSpec(points_per_axis=201, axes=("a", "s"),
                        ranges={"a": (0.0, 1.0), "s": (0.0, ctx.S)})
    a_vals = grid.points("a") if "a" in grid.axes else np.array([grid.ranges.get("a", (1.0, 1.0))[0]])
    s_vals = grid.points("s") if "s" in grid.axes else np.array([grid.ranges.get("s", (ctx.S, ctx.S))[0]])
    A, S, rho_U, rho_L, energy, ok = tight_energy_grid(scenario_1mass, a_vals, s_vals)
    if not ok.any():
        raise InfeasibleError("no feasible point on the joint grid")
    masked = np.where(ok, energy, np.inf)
    i = np.unravel_index(int(np.argmin(masked)), masked.shape)
    plan = OffloadPlan(np.array([[A[i]]]), np.array([[S[i]]]),
                       np.array([[rho_U[i]]]), np.array([[rho_L[i]]]))
    return plan, float(masked[i])
