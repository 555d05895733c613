# %% [markdown]
# # Where the low-order theory stops
#
# Just above L0 the sphere has halo equilibria and the analytic halo is a
# smooth closed curve. Integrated numerically, its initial condition drifts
# far from periodicity: at this order the theory gives the shape of a halo,
# not a usable seed.

# %%
import numpy as np

from hillhopf.orbits import periodicity_error, synthesize

halo = synthesize("halo-north", 0.08)
print(f"analytic period {halo.period:.4f}")
print(f"return error {periodicity_error(halo.seed(), halo.period):.2f}")
print(f"closure of the analytic curve {np.abs(halo.state_at(2 * np.pi) - halo.states[0]).max():.1e}")

# %% [markdown]
# For larger L' the halo mean orbit is nearly circular and the first-order
# corrections push the osculating state outside |G| <= L; synthesis refuses.

# %%
from hillhopf.errors import DomainError

try:
    synthesize("halo-north", 0.5)
except DomainError as exc:
    print("refused:", exc)
