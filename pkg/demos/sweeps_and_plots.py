# %% [markdown]
# # Sweeping a parameter
#
# A sweep rebuilds the scenario at each value, runs every scheme and writes a
# CSV, a JSON sidecar and three SVG charts. The same config and seed always
# give the same bytes.

# %%
import tempfile
from pathlib import Path

from samin.config import parse_scenario_text
from samin.experiments import SweepResult, run_sweep
from samin.plotting import render_plots

cfg = parse_scenario_text("""
[task]
t_L = 700 ms
[sweep]
variable = S
values = 2, 4, 6, 8, 10 Mbit
""")

result = run_sweep(cfg)
values, energy = result.series("stp", "E_total")
for v, e in zip(values, energy):
    print(f"S = {v / 1e6:4.0f} Mbit   E = {e:8.3f} J")

# %%
out = Path(tempfile.mkdtemp())
csv_path, json_path = result.write(out)
for path in render_plots(result, out):
    print("wrote", Path(path).name)

# %% [markdown]
# The CSV carries its own config, so it is enough to redraw the charts.

# %%
again = SweepResult.from_csv(Path(csv_path).read_text())
print("same rows after reload:", again.rows == result.rows)
