# %% [markdown]
# # Links from a ship
#
# A MASS can reach two relays: a hovering UAV a few hundred metres away and a
# LEO satellite in its coverage window. This walk-through prints the numbers
# that drive every later cost.

# %%
import numpy as np

from samin import SystemParams, leo_geometry
from samin import model

params = SystemParams()

# %% [markdown]
# ## Satellite geometry
# The visible arc, the slant range and the pass duration follow from altitude
# and elevation angle alone.

# %%
geo = leo_geometry(params)
print(f"visible arc   {geo.phi:.4f} rad")
print(f"slant range   {geo.d_L / 1e3:.1f} km")
print(f"orbital speed {geo.v_L / 1e3:.2f} km/s")
print(f"coverage      {geo.T_coverage:.0f} s")
print(f"round trip    {2 * geo.d_L / params.c_light * 1e3:.2f} ms")

# %% [markdown]
# ## UAV channel versus distance
# Deterministic mode drops the shadowing draw and uses the mean fading power.

# %%
distances = np.array([50.0, 100.0, 200.0, 300.0])
gains = np.array([model.uav_channel_gain(params, d) for d in distances])
for d, g in zip(distances, gains):
    print(f"d = {d:5.0f} m   path loss {model.uav_path_loss_db(params, d):6.2f} dB   gain {g:.3e}")

# a stochastic draw wobbles around that mean
draws = np.array([model.uav_channel_gain(params, 200.0, mode="stochastic", seed=k) for k in range(2000)])
print(f"stochastic draws at 200 m: median ratio {np.median(draws) / gains[2]:.3f}, "
      f"10-90% spread {np.percentile(draws, 10) / gains[2]:.2f}..{np.percentile(draws, 90) / gains[2]:.2f}")

# %% [markdown]
# ## Transmit cost
# Power grows exponentially with the bits pushed through a fixed window, so
# splitting a payload across both links is cheaper than using either alone.

# %%
h_L = model.leo_channel_gain(params, geo.d_L)
s = 6e6
for a in (0.0, 0.25, 0.5, 0.75, 1.0):
    _, e_U = model.uav_tx_power_energy(params, gains[2], a, s, t_U=0.4)
    _, e_L = model.leo_tx_power_energy(params, h_L, a, s, t_L=0.7, d_L=geo.d_L)
    print(f"a = {a:4.2f}   UAV {e_U:7.3f} J   LEO {e_L:7.3f} J   sum {e_U + e_L:7.3f} J")
