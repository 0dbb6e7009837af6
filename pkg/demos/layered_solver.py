# %% [markdown]
# # Inside the solver
#
# Each sweep of the alternating loop solves three small problems per MASS:
# a bisection on the offload ratio, a bisection on the offloaded volume, and a
# closed-form CPU share that makes the deadline tight.

# %%
import numpy as np

from samin import default_scenario, mris, stp_solve
from samin.optimizer import (
    ScalarProblem,
    energy_gradient_a,
    offload_ratio_bounds,
    optimal_rho_leo,
    optimal_rho_uav,
)

sc = default_scenario()
ctx = sc.context(0, 0, a=0.5, s=6e6, rho_U=2e10, rho_L=1e11)

# %% [markdown]
# ## One ratio step
# The bounds come from the deadline on each edge path; bisection then finds
# where the derivative changes sign.

# %%
lo, hi = offload_ratio_bounds(ctx, ctx.rho_U, ctx.rho_L, ctx.s)
calls = []


def slope(a):
    calls.append(a)
    return energy_gradient_a(ctx, a)


a_star = mris(ScalarProblem(lo, hi, slope, 1e-6))
print(f"ratio interval [{lo:.4f}, {hi:.4f}] -> a* = {a_star:.6f} after {len(calls)} derivative calls")

# %% [markdown]
# ## CPU shares at the optimum
# Given the split, the cheapest share finishes exactly at the deadline.

# %%
c = sc.params.c_bit_uav
rho_U = optimal_rho_uav(a_star, ctx.s, c, ctx.T_max, ctx.t_U)
rho_L = optimal_rho_leo(a_star, ctx.s, sc.params.c_bit_leo, ctx.T_max, ctx.t_L)
print(f"UAV share {rho_U / 1e9:.2f} GHz, LEO share {rho_L / 1e9:.2f} GHz")
print("UAV path latency", ctx.t_U + a_star * ctx.s * c / rho_U)

# %% [markdown]
# ## The whole loop
# The objective trace never goes up: a sweep that would raise energy is
# rejected and the loop stops there.

# %%
report = stp_solve(sc)
print("trace:", np.round(report.objective_trace, 4))
print("sweeps:", report.iterations_used, "converged:", report.converged)
print("mean ratio:", report.plan.a.mean().round(3), " offloaded share:", (report.plan.s / sc.S).mean().round(3))
