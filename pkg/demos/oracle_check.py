# %% [markdown]
# # Checking the solver by brute force
#
# For a single MASS the (ratio, volume) plane is small enough to scan on a
# 201 x 201 grid with deadline-tight CPU shares. The oracle only uses the cost
# model, never the solver, so agreement is an independent check.

# %%
from samin import default_scenario, stp_solve
from samin import oracle

sc = default_scenario()
print(f"{'MASS':>6s}{'STP [J]':>10s}{'grid [J]':>10s}{'a STP':>8s}{'a grid':>8s}")
for m in range(sc.n_uav):
    for n in range(sc.n_mass):
        single = sc.subset(m, n)
        report = stp_solve(single)
        plan, E_grid = oracle.joint_grid_min(single)
        print(f"{m},{n:>4d}{report.objective:10.4f}{E_grid:10.4f}"
              f"{report.plan.a[0, 0]:8.3f}{plan.a[0, 0]:8.3f}")

# %% [markdown]
# Where the grid lands on a = 1 the MASS sends nothing to the satellite, so
# the satellite's compute cost vanishes outright. That jump sits outside the
# smooth interval the bisection searches, which is why the two can differ
# there.
