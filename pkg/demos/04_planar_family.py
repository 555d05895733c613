# %% [markdown]
# # The planar Lyapunov family and its bifurcations
#
# Starting from a tiny planar orbit around L1 we follow the family by
# pseudo-arclength continuation up to positive energy. Stability indices
# crossing |s| = 2 mark the bifurcations (halos branch off at the first
# one). Runs in about half a minute.

# %%
import os

from hillhopf.orbits import continue_family, family_to_csv, locate_bifurcations, \
    planar_lyapunov_seed

seed = planar_lyapunov_seed()
print(f"seed: E = {seed.energy:.6f}, T = {seed.period:.6f}")
members = continue_family(seed, 400, step=0.01, max_step=0.1, stop=lambda m: m.energy > 0.3)
print(f"{len(members)} members, last energy {members[-1].energy:.3f}")

# %%
for b in locate_bifurcations(members):
    print(f"E = {b.energy:+.4f}  {b.index} through {b.value:+.0f}  ({b.direction})")

# %%
out = os.environ.get("HILLHOPF_OUTPUT_DIR", ".")
family_to_csv(members, os.path.join(out, "planar_family.csv"))
