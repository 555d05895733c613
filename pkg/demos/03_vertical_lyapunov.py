# %% [markdown]
# # From the sphere to a vertical Lyapunov orbit
#
# The E+1 equilibrium (I1 = L'/2) is a rectilinear vertical oscillation on
# average. Undoing the averaging, the Lissajous variables and the saddle
# reduction gives initial conditions in the rotating frame. For a small
# amplitude they are already almost periodic.

# %%
from hillhopf.orbits import correct, periodicity_error, synthesize

orbit = synthesize("vertical-lyapunov", 0.001)
print(f"analytic period {orbit.period:.6f}")
print(f"initial condition {orbit.seed()}")
print(f"return error after one period: {periodicity_error(orbit.seed(), orbit.period):.2e}")

# %% [markdown]
# Most of that error comes from the first-order period, which differs from
# the linear vertical period pi by about 2e-3. At larger amplitude the seed
# needs differential correction. The orbit is symmetric, so half-period
# shooting converges in a few Newton steps.

# %%
seed = synthesize("vertical-lyapunov", 0.02)
print(f"before correction: {periodicity_error(seed.seed(), seed.period):.2e}")
fixed = correct(seed.seed(), seed.period)
print(f"after {fixed.iterations} iterations: residual {fixed.residual:.1e}")
print(f"T = {fixed.period:.6f}, E = {fixed.energy:.6f}, s1 = {fixed.s1:.4g}, s2 = {fixed.s2:.4g}")
