# %% [markdown]
# # Four ways to split the work
#
# The jointly optimised plan is compared against three simpler schemes:
# pure local or single-relay offloading, an even three-way split, and the
# optimiser with CPU shares frozen at an even split.

# %%
from samin import default_scenario, evaluate_plan, solve_all

sc = default_scenario()
reports = solve_all(sc, warm_start=True)

# %%
print(f"{'scheme':8s}{'energy [J]':>12s}{'mean T [s]':>12s}{'sweeps':>8s}")
for name, report in reports.items():
    metrics = evaluate_plan(sc, report.plan)
    print(f"{name.upper():8s}{report.objective:12.3f}{metrics.T_total.mean():12.3f}{report.iterations_used:8d}")

# %% [markdown]
# Where does the energy go? Split the optimised total by cost term.

# %%
m = evaluate_plan(sc, reports["stp"].plan)
for label, part in (("local CPU", m.E_local), ("UAV radio", m.E_tx_U), ("LEO radio", m.E_tx_L),
                    ("UAV CPU", m.E_cpu_U), ("LEO CPU", m.E_cpu_L)):
    print(f"{label:10s}{part.sum():8.3f} J")

# %% [markdown]
# Without warm starts the loop begins from an even CPU split and stops at its
# own stationary point, which can sit above the frozen-share scheme.

# %%
cold = solve_all(sc, warm_start=False)
print("cold STP", round(cold["stp"].objective, 3), " EACR", round(cold["eacr"].objective, 3))
