"""Acceptance suite: one test per criterion, each at its stated tolerance.

Every test records a PASS/FAIL line (shown in the terminal summary) and then
asserts, so a failing criterion also fails the run.
"""

import time

import numpy as np

import hillhopf.lissajous as lj
from hillhopf.center_manifold import detuned_split, t3_direct, t3_inverse
from hillhopf.hill import RHO
from hillhopf.hopf import (HopfPoint, equilibria, integrate_reduced, level_components,
                           level_curve, reduced_flow, reduced_hamiltonian, tangent_stability,
                           thresholds)
from hillhopf.linear import J4, build_constants
from hillhopf.lissajous import (LissajousState, lissajous_hamiltonian, lissajous_terms,
                                lissajous_to_cm, normalized_terms)
from hillhopf.orbits import (continue_family, correct, locate_bifurcations,
                             periodicity_error, planar_lyapunov_seed, synthesize)

c = build_constants()


def _sig(value, digits):
    return float(f"{value:.{digits}g}")


# ---------------------------------------------------------------------------

def test_criterion_1_constants(acceptance):
    t0 = time.perf_counter()
    printed = [("rho", RHO, 0.693, 3), ("lam", c.lam, 2.508, 4), ("omega", c.omega, 2.0716, 5),
               ("delta", c.delta, 0.068, 2), ("delta*", c.delta_star, 0.03454, 4),
               ("k0", c.k0, 6.5e-7, 2), ("k1", c.k1, 0.17, 2), ("k2", c.k2, 0.055, 2),
               ("k3", c.k3, 0.003, 1), ("k4", c.k4, 0.87, 2)]
    bad = [name for name, got, want, d in printed if abs(_sig(got, d) - want) > 1e-12 * abs(want)]
    th = thresholds()
    ref = {"L0": 0.0768606, "L1": 1.17113, "Ltilde": 1.29839, "L2": 1.45668}
    rel = {k: abs(getattr(th, k) / v - 1) for k, v in ref.items()}
    worst = max(rel.values())
    dt = time.perf_counter() - t0
    ok = not bad and worst <= 1e-4 and dt < 1.0
    acceptance(1, "constants and thresholds", ok,
               f"digit mismatches {bad or 'none'}; worst threshold rel err {worst:.1e}", dt)
    assert ok


def test_criterion_2_transformation_chain(acceptance):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    n = 200
    L = rng.uniform(0.01, 1.0, n)
    st_ = LissajousState(rng.uniform(0, 2 * np.pi, n), rng.uniform(0, 2 * np.pi, n), L,
                         L * rng.uniform(-1, 1, n))
    # expanded Hamiltonian against the centre-manifold Hamiltonian (independent route)
    principal, perturbation = detuned_split(lissajous_to_cm(st_))
    ref = principal + perturbation
    expansion = np.max(np.abs(lissajous_hamiltonian(st_) - ref) / np.abs(ref))
    # average of A1 over ell against B1
    grid = np.linspace(0, 2 * np.pi, 1024, endpoint=False)
    avg = 0.0
    for i in range(20):
        _, a1, _ = lissajous_terms(LissajousState(grid, st_.g[i], L[i], st_.G[i]))
        _, b1, _ = normalized_terms(LissajousState(0.0, st_.g[i], L[i], st_.G[i]))
        avg = max(avg, abs(np.mean(a1) - b1))
    # quadratic identity
    y, z, Y, Z = lissajous_to_cm(st_).T
    quad = np.max(np.abs(0.5 * (Y * Y + Z * Z) + 0.5 * c.omega2 * (y * y + z * z)
                         - c.omega * L) / (c.omega * L))
    symp = np.abs(c.A.T @ J4 @ c.A - J4).max()
    # saddle-reduction round trip: exact, so residual / |s|^2 stays bounded at every scale
    amps = np.logspace(-4, -1, 4)
    t3_ratio = 0.0
    for a in amps:
        s = a * rng.normal(size=(50, 6))
        t3_ratio = max(t3_ratio, np.abs(t3_inverse(t3_direct(s)) - s).max() / a ** 2)
    # short-period round trip in the formal ordering (detuning ~ sqrt(L'))
    slope = _short_period_slope()
    dt = time.perf_counter() - t0
    ok = (expansion <= 1e-9 and avg <= 1e-12 and quad <= 1e-13 and symp <= 1e-12
          and t3_ratio <= 1e-10 and slope >= 1.8 and dt < 10)
    acceptance(2, "transformation-chain identities", ok,
               f"expansion {expansion:.1e}; <A1>-B1 {avg:.1e}; quad {quad:.1e}; AtJA {symp:.1e}; "
               f"T3 resid/|s|^2 {t3_ratio:.1e} (exact); T5 slope {slope:.2f}", dt)
    assert ok


def _short_period_slope():
    """Momentum round-trip slope with the detuning part scaled as sqrt(L')."""
    table = lj.CORRECTION_TERMS

    def parts(state):
        try:
            lj.CORRECTION_TERMS = {k: v for k, v in table.items() if k[0] == 2}
            det = np.array(lj._periodic_part(state))
            lj.CORRECTION_TERMS = {k: v for k, v in table.items() if k[0] != 2}
            cub = np.array(lj._periodic_part(state))
        finally:
            lj.CORRECTION_TERMS = table
        return det, cub

    rng = np.random.default_rng(8)
    n = 50
    g, ell = rng.uniform(0, 2 * np.pi, (2, n))
    u = rng.uniform(-0.6, 0.6, n)
    L_values = np.logspace(-4, -2, 5)
    res = []
    for L in L_values:
        k = np.sqrt(L / L_values[-1])

        def step(state, sign):
            det, cub = parts(state)
            return LissajousState(*(np.asarray(x) + sign * (k * p + q)
                                    for x, p, q in zip(state, det, cub)))

        mean = LissajousState(ell, g, np.full(n, L), u * L)
        back = step(step(mean, 1), -1)
        res.append(max(np.abs(back.L - mean.L).max(), np.abs(back.G - mean.G).max()))
    return np.polyfit(np.log(L_values), np.log(res), 1)[0]


def test_criterion_3_reduced_flow(acceptance):
    t0 = time.perf_counter()
    th = thresholds()
    Lp = 0.7
    eqs = {e.family: e for e in equilibria(Lp)}
    h = 0.5 * (eqs["E-1"].energy + eqs["E+2"].energy)
    curve = level_curve(Lp, h, 50)
    p0 = HopfPoint(curve["I1"][10], curve["I2"][10], curve["I3"][10], Lp)
    _, traj = integrate_reduced(p0, (0, 1e4), t_eval=np.linspace(0, 1e4, 200))
    r = traj.I1 ** 2 + traj.I2 ** 2 + traj.I3 ** 2
    e = reduced_hamiltonian(traj)
    drift = max(np.abs(r / r[0] - 1).max(), np.abs(e / e[0] - 1).max())
    grid = np.logspace(-2, np.log10(3), 100)
    resid, mismatches = 0.0, 0
    for L in grid:
        for eq in equilibria(L, check=False):
            resid = max(resid, np.abs(reduced_flow(eq.point)).max())
            numeric = tangent_stability(eq.point)
            if numeric != "degenerate" and numeric != eq.stability:
                mismatches += 1
    counts = [(len(equilibria(x - 1e-4)), len(equilibria(x + 1e-4)))
              for x in (th.L0, th.L1, th.L2)]
    dt = time.perf_counter() - t0
    ok = (drift <= 1e-10 and resid <= 1e-12 and counts == [(2, 4), (4, 6), (6, 4)]
          and mismatches == 0 and dt < 30)
    acceptance(3, "reduced-flow suite", ok,
               f"drift {drift:.1e}; eq residual {resid:.1e}; counts {counts}; "
               f"stability mismatches {mismatches}/100 L'", dt)
    assert ok


def test_criterion_4_vertical_lyapunov(acceptance):
    t0 = time.perf_counter()
    orb = synthesize("vertical-lyapunov", 0.001)
    err = periodicity_error(orb.seed(), orb.period)
    dt = time.perf_counter() - t0
    ok = abs(orb.period - 3.13965) <= 1e-3 and err <= 1e-3 and dt < 5
    acceptance(4, "vertical Lyapunov at L'=0.001", ok,
               f"T {orb.period:.6f}; return error {err:.2e} (<= 1e-3)", dt)
    assert ok


def test_criterion_5_correction(acceptance):
    t0 = time.perf_counter()
    orb = synthesize("vertical-lyapunov", 0.02)
    before = periodicity_error(orb.seed(), orb.period)
    po = correct(orb.seed(), orb.period, tol=1e-12, max_iter=10)
    dt = time.perf_counter() - t0
    ok = 1e-4 <= before <= 1e-1 and po.residual <= 1e-12 and po.iterations <= 10 and dt < 10
    acceptance(5, "differential correction at L'=0.02", ok,
               f"pre-correction error {before:.2e}; residual {po.residual:.1e} in "
               f"{po.iterations} iterations", dt)
    assert ok


def test_criterion_6_planar_family(acceptance):
    t0 = time.perf_counter()
    seed = planar_lyapunov_seed()
    members = continue_family(seed, 400, step=0.01, max_step=0.1,
                              stop=lambda m: m.energy > 0.3)
    found = [b.energy for b in locate_bifurcations(members)]
    targets = (-2.0, -0.6, 0.0)
    matched = all(any(abs(e - t) <= 0.15 for e in found) for t in targets)
    dt = time.perf_counter() - t0
    ok = members[-1].energy > 0 and len(found) == 3 and matched and dt < 600
    acceptance(6, "planar Lyapunov family crossings", ok,
               f"{len(members)} members to E={members[-1].energy:.3f}; crossings at "
               + ", ".join(f"{e:.4f}" for e in found), dt)
    assert ok


def _band_levels(Lp):
    """One energy inside each band between consecutive equilibrium energies."""
    energies = sorted({round(e.energy, 13) for e in equilibria(Lp)})
    return [0.5 * (a + b) for a, b in zip(energies[:-1], energies[1:])]


def _band_counts(Lp):
    return len(equilibria(Lp)), [level_components(Lp, h) for h in _band_levels(Lp)]


def test_criterion_7_sphere_portraits(acceptance):
    t0 = time.perf_counter()
    expected = {0.05: (2, [1]), 0.1: (4, [1, 2]), 0.7: (4, [1, 2]),
                1.29839: (6, [1, 2, 2]), 2.5: (4, [1, 2])}
    got = {Lp: _band_counts(Lp) for Lp in expected}
    # the sampler itself must produce points on every non-empty band
    sampled = all(len(level_curve(Lp, h, 200)["I1"]) > 0
                  for Lp in expected for h in _band_levels(Lp))
    dt = time.perf_counter() - t0
    ok = got == expected and sampled and dt < 60
    acceptance(7, "sphere portraits at five L'", ok,
               "; ".join(f"L'={k}: {v[0]} eq, components {v[1]}" for k, v in got.items()), dt)
    assert ok


def test_criterion_8_halo_caveat(acceptance):
    t0 = time.perf_counter()
    orb = synthesize("halo-north", 0.08)
    err = periodicity_error(orb.seed(), orb.period)
    # analytic curve closes on itself: sample n is sample 0 again
    closure = np.abs(orb.state_at(2 * np.pi) - orb.states[0]).max()
    steps = np.linalg.norm(np.diff(np.vstack([orb.states, orb.states[:1]]), axis=0), axis=1)
    dt = time.perf_counter() - t0
    ok = err > 1e-2 and closure <= 1e-12 and steps.max() < 10 * np.median(steps) and dt < 5
    acceptance(8, "halo caveat at L'=0.08", ok,
               f"numerical return error {err:.2f} (> 1e-2); analytic closure {closure:.1e}", dt)
    assert ok
