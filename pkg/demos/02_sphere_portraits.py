# %% [markdown]
# # Phase portraits on the reduced sphere
#
# After averaging, the slow dynamics lives on a sphere of radius L'/2.
# Each equilibrium is a family of periodic orbits of the full problem. We
# list the equilibria at five values of L' and count how many closed curves
# make up each energy level between consecutive critical energies.

# %%
import os

import numpy as np

from hillhopf.hopf import equilibria, level_components, level_curve

for Lp in (0.05, 0.1, 0.7, 1.29839, 2.5):
    eqs = equilibria(Lp)
    print(f"L' = {Lp}")
    for eq in eqs:
        print(f"   {eq.family} {eq.orbit_kind:18s} {eq.stability:10s} h = {eq.energy:.8f}")
    energies = sorted({round(e.energy, 13) for e in eqs})
    bands = [0.5 * (a + b) for a, b in zip(energies[:-1], energies[1:])]
    print("   closed curves per band:", [level_components(Lp, h) for h in bands])

# %% [markdown]
# The level curves themselves can be written to CSV for plotting. Branch
# numbers tell the four sign choices of (I2, I3) apart.

# %%
out = os.environ.get("HILLHOPF_OUTPUT_DIR", ".")
curve = level_curve(0.7, 0.5 * sum(sorted(e.energy for e in equilibria(0.7))[1:3]), 400)
rows = np.column_stack([curve["I1"], curve["I2"], curve["I3"], curve["branch"]])
np.savetxt(os.path.join(out, "sphere_level_0.7.csv"), rows, delimiter=",",
           header="I1,I2,I3,branch", comments="")
print(f"{len(rows)} points written")
