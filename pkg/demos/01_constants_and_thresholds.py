# %% [markdown]
# # Constants of the averaged theory
#
# Everything downstream is fixed by the geometry of the L1 point of the Hill
# problem. This script prints the linear frequencies, the detuning, the
# coefficients of the normalized Hamiltonian and the values of L' where the
# reduced flow changes its number of equilibria.

# %%
from hillhopf.hill import RHO, hamiltonian, libration_points
from hillhopf.hopf import thresholds
from hillhopf.linear import build_constants

c = build_constants()
print(f"rho = {RHO:.6f}   H(L1) = {hamiltonian(libration_points()[0]):.6f}")
print(f"saddle rate lam = {c.lam:.6f}")
print(f"planar frequency omega = {c.omega:.7f}, vertical frequency 2")
print(f"detuning delta = {c.delta:.7f}, delta* = {c.delta_star:.7f}")

# %% [markdown]
# The normalized Hamiltonian is a quadratic polynomial in the Hopf
# coordinates; its coefficients are:

# %%
for name in ("k0", "k1", "k2", "k3", "k4"):
    print(f"{name} = {getattr(c, name):.6g}")

# %% [markdown]
# Halo orbits appear at L0, the two bridge families live between L1 and L2,
# and at Ltilde the halos sit exactly at the poles of the sphere.

# %%
for name, value in thresholds().as_dict().items():
    print(f"{name:7s} {value:.7f}")
