"""Shared generators for the test suite."""
from __future__ import annotations

import numpy as np

from samin.errors import InfeasibleError
from samin.optimizer import (
    ScalarProblem,
    energy_gradient_a,
    energy_gradient_s,
    offload_ratio_bounds,
    offload_volume_bounds,
)
from samin.scenario import random_scenario


def random_context(rng: np.random.Generator):
    """A single-MASS context with a random CPU-share iterate and feasible (a, s)."""
    while True:
        sc = random_scenario(int(rng.integers(0, 2**31)))
        m = int(rng.integers(sc.n_uav))
        n = int(rng.integers(sc.n_mass))
        rho_U = float(rng.uniform(5e9, 5e10))
        rho_L = float(rng.uniform(5e9, 5e10))
        ctx = sc.context(m, n, rho_U=rho_U, rho_L=rho_L)
        try:
            a = float(rng.uniform(0.05, 0.95))
            s_low, s_high = offload_volume_bounds(ctx, a, rho_U, rho_L)
            if s_high - s_low < 1e-3 * ctx.S:
                continue
            s = float(rng.uniform(s_low, s_high))
            a_low, a_high = offload_ratio_bounds(ctx, rho_U, rho_L, s)
        except InfeasibleError:
            continue
        if a_high - a_low < 1e-3:
            continue
        a = float(np.clip(a, a_low, a_high))
        return ctx.with_iterate(a=a, s=s)


def a_problem(ctx, delta=1e-6):
    lo, hi = offload_ratio_bounds(ctx, ctx.rho_U, ctx.rho_L, ctx.s)
    return ScalarProblem(lo, hi, lambda x: energy_gradient_a(ctx, x), delta)


def s_problem(ctx, delta=1e-6):
    lo, hi = offload_volume_bounds(ctx, ctx.a, ctx.rho_U, ctx.rho_L)
    return ScalarProblem(lo, hi, lambda x: energy_gradient_s(ctx.with_iterate(a=ctx.a), x),
                         delta * ctx.S)
