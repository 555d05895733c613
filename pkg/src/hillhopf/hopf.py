"""Reduced flow on the Hopf sphere ``I1**2 + I2**2 + I3**2 = L'**2 / 4``.

The averaged Hamiltonian depends on ``(g', G')`` only, with ``L'`` a
parameter. The Hopf coordinates ``I1 = omega s' d' cos 2g'``,
``I2 = omega s' d' sin 2g'``, ``I3 = G'/2`` remove the singularity of the
``(g, G)`` chart at circular states.
"""

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, IntegrationError
from .linear import build_constants
from .lissajous import LissajousState, state_functions

FAMILIES = {
    "E+1": "vertical-lyapunov",
    "E-1": "planar-lyapunov",
    "E+2": "halo-north",
    "E-2": "halo-south",
    "E+3": "bridge-a",
    "E-3": "bridge-b",
}
ORBIT_KINDS = {v: k for k, v in FAMILIES.items()}


class HopfPoint(NamedTuple):
    I1: object
    I2: object
    I3: object
    Lp: object


@dataclass(frozen=True)
class ReducedEquilibrium:
    family: str
    point: HopfPoint
    stability: str
    orbit_kind: str

    @property
    def energy(self):
        return float(reduced_hamiltonian(self.point))


@dataclass(frozen=True)
class BifurcationThresholds:
    L0: float
    L1: float
    L2: float
    Ltilde: float

    def as_dict(self):
        return {"L0": self.L0, "L1": self.L1, "L2": self.L2, "Ltilde": self.Ltilde}


def to_hopf(mean):
    _, g, L, G = mean
    c = build_constants()
    s, d = state_functions(L, G)
    r = c.omega * s * d
    return HopfPoint(r * np.cos(2 * np.asarray(g)), r * np.sin(2 * np.asarray(g)),
                     0.5 * np.asarray(G, dtype=float), np.asarray(L, dtype=float))


def from_hopf(point, ell=0.0):
    """Mean Lissajous elements of a sphere point.

    Returns ``(state, circular)``. At the poles (``I1 = I2 = 0``) ``g'`` is
    undefined and reported as 0 with ``circular`` set.
    """
    I1, I2, I3, Lp = (np.asarray(v, dtype=float) for v in point)
    circular = np.hypot(I1, I2) <= 1e-14 * np.maximum(Lp, 1e-300)
    g = np.where(circular, 0.0, 0.5 * np.arctan2(I2, I1))
    G = np.clip(2 * I3, -Lp, Lp)
    return LissajousState(np.asarray(ell, dtype=float), g, Lp, G), circular


def reduced_hamiltonian(point):
    c = build_constants()
    I1, I2, I3, Lp = (np.asarray(v, dtype=float) for v in point)
    w, ds = c.omega, c.delta_star
    return (w * (1 - 0.5 * ds) * Lp - c.k1 * Lp ** 2 + (c.k2 * Lp - w * ds) * I1
            + c.k3 * (I2 ** 2 - I1 ** 2) + c.k4 * I3 ** 2)


def reduced_flow(point):
    """Time derivatives ``(dI1, dI2, dI3)``."""
    c = build_constants()
    I1, I2, I3, Lp = (np.asarray(v, dtype=float) for v in point)
    lin = c.delta_star * c.omega - c.k2 * Lp
    return np.stack(np.broadcast_arrays(
        2 * (c.k3 - c.k4) * I2 * I3,
        (lin + 2 * (c.k3 + c.k4) * I1) * I3,
        -(lin + 4 * c.k3 * I1) * I2,
    ), axis=-1)


def flow_jacobian(point):
    c = build_constants()
    I1, I2, I3, Lp = (float(v) for v in point)
    lin = c.delta_star * c.omega - c.k2 * Lp
    return np.array([
        [0.0, 2 * (c.k3 - c.k4) * I3, 2 * (c.k3 - c.k4) * I2],
        [2 * (c.k3 + c.k4) * I3, 0.0, lin + 2 * (c.k3 + c.k4) * I1],
        [-4 * c.k3 * I2, -(lin + 4 * c.k3 * I1), 0.0],
    ])


def thresholds():
    c = build_constants()
    num = c.delta_star * c.omega
    return BifurcationThresholds(
        L0=num / (c.k2 + c.k3 + c.k4),
        L1=num / (c.k2 + 2 * c.k3),
        L2=num / (c.k2 - 2 * c.k3),
        Ltilde=num / c.k2,
    )


def halo_abscissa(Lp):
    """``I1`` of the E+-2 equilibria (may lie outside the sphere)."""
    c = build_constants()
    return (c.k2 * Lp - c.delta_star * c.omega) / (2 * (c.k3 + c.k4))


def bridge_abscissa(Lp):
    """``I1`` of the E+-3 equilibria (may lie outside the sphere)."""
    c = build_constants()
    return (c.k2 * Lp - c.delta_star * c.omega) / (4 * c.k3)


def tangent_stability(point, rtol=1e-9):
    """Classify an equilibrium from the flow linearised in the tangent plane.

    Returns ``'elliptic'``, ``'hyperbolic'`` or ``'degenerate'``.
    """
    p = np.array([float(point[0]), float(point[1]), float(point[2])])
    # orthonormal basis of the tangent plane
    basis = np.linalg.svd(p[None, :])[2][1:].T
    restricted = basis.T @ flow_jacobian(point) @ basis
    det = np.linalg.det(restricted)
    scale = np.abs(restricted).max() ** 2
    if abs(det) <= rtol * max(scale, 1e-300):
        return "degenerate"
    return "elliptic" if det > 0 else "hyperbolic"


def _rule_stability(family, Lp, th):
    if family == "E+1":
        return "elliptic" if Lp < th.L2 else "hyperbolic"
    if family == "E-1":
        return "hyperbolic" if th.L0 < Lp < th.L1 else "elliptic"
    if family in ("E+2", "E-2"):
        return "elliptic"
    return "hyperbolic"


def equilibria(Lp, check=True):
    """All equilibria of the reduced flow for a given ``L'``.

    Stability comes from the closed-form rules. With ``check`` the labels
    are compared against the tangent-plane linearisation (skipped at exact
    bifurcation values, where that test is degenerate); a disagreement
    raises ``AssertionError``.
    """
    if not Lp > 0:
        raise DomainError("L' must be positive")
    th = thresholds()
    half = 0.5 * Lp
    points = {"E+1": HopfPoint(half, 0.0, 0.0, Lp), "E-1": HopfPoint(-half, 0.0, 0.0, Lp)}
    i1h = halo_abscissa(Lp)
    if Lp >= th.L0 and abs(i1h) <= half:
        i3 = 0.5 * np.sqrt(max(Lp ** 2 - 4 * i1h ** 2, 0.0))
        points["E+2"] = HopfPoint(i1h, 0.0, i3, Lp)
        points["E-2"] = HopfPoint(i1h, 0.0, -i3, Lp)
    i1b = bridge_abscissa(Lp)
    if th.L1 <= Lp <= th.L2 and abs(i1b) <= half:
        i2 = 0.5 * np.sqrt(max(Lp ** 2 - 4 * i1b ** 2, 0.0))
        points["E+3"] = HopfPoint(i1b, i2, 0.0, Lp)
        points["E-3"] = HopfPoint(i1b, -i2, 0.0, Lp)
    out = []
    for fam, pt in points.items():
        label = _rule_stability(fam, Lp, th)
        if check:
            numeric = tangent_stability(pt)
            if numeric != "degenerate" and numeric != label:
                raise AssertionError(f"{fam} at L'={Lp}: rule says {label}, linearisation {numeric}")
        out.append(ReducedEquilibrium(fam, pt, label, FAMILIES[fam]))
    return out


def find_equilibrium(family, Lp):
    """The equilibrium of a family (``'E+1'`` or an orbit kind) at ``L'``."""
    from .errors import FamilyNotPresentError

    key = ORBIT_KINDS.get(family, family)
    for eq in equilibria(Lp, check=False):
        if eq.family == key:
            return eq
    raise FamilyNotPresentError(f"{family} does not exist at L' = {Lp}")


def level_radicands(I1, Lp, h):
    """``(I2**2, I3**2)`` on the level set ``reduced_hamiltonian = h``."""
    c = build_constants()
    I1 = np.asarray(I1, dtype=float)
    lin = c.delta_star * c.omega - c.k2 * Lp
    base = -(1 - 0.5 * c.delta_star) * c.omega * Lp + h
    den = c.k4 - c.k3
    i2sq = -((c.k3 + c.k4) * I1 ** 2 + lin * I1 + (c.k1 - 0.25 * c.k4) * Lp ** 2 + base) / den
    i3sq = (2 * c.k3 * I1 ** 2 + lin * I1 + (c.k1 - 0.25 * c.k3) * Lp ** 2 + base) / den
    return i2sq, i3sq


def _radicand_polys(Lp, h):
    c = build_constants()
    lin = c.delta_star * c.omega - c.k2 * Lp
    base = -(1 - 0.5 * c.delta_star) * c.omega * Lp + h
    den = c.k4 - c.k3
    p2 = np.array([-(c.k3 + c.k4), -lin, -((c.k1 - 0.25 * c.k4) * Lp ** 2 + base)]) / den
    p3 = np.array([2 * c.k3, lin, (c.k1 - 0.25 * c.k3) * Lp ** 2 + base]) / den
    return p2, p3


def _valid_intervals(Lp, h):
    """Maximal ``I1`` intervals on which both radicands are non-negative."""
    half = 0.5 * Lp
    p2, p3 = _radicand_polys(Lp, h)
    cuts = [-half, half]
    for p in (p2, p3):
        for root in np.roots(p):
            if abs(root.imag) < 1e-14 * Lp and -half < root.real < half:
                cuts.append(root.real)
    cuts = np.unique(np.array(cuts))
    tol = 1e-12 * Lp ** 2
    ok = lambda v: np.polyval(p2, v) >= -tol and np.polyval(p3, v) >= -tol
    intervals = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if ok(0.5 * (a + b)):
            if intervals and intervals[-1][1] == a:
                intervals[-1] = (intervals[-1][0], b, intervals[-1][2] + [a])
            else:
                intervals.append((a, b, []))
    for x in cuts:  # isolated points (level set touching the sphere)
        if ok(x) and not any(a <= x <= b for a, b, _ in intervals):
            intervals.append((x, x, []))
    return intervals, p2, p3


def level_curve(Lp, h, n=400):
    """Sample the trajectory ``reduced_hamiltonian = h`` on the sphere.

    Sweeps ``I1`` over ``[-L'/2, L'/2]`` (nodes plus the exact turning
    points) and keeps the up-to-four sign branches of ``(I2, I3)``.
    Returns a dict of equal-length arrays ``I1, I2, I3, branch`` where
    ``branch`` is 0..3 encoding ``(sign I2, sign I3)`` as
    ``(+,+), (-,+), (+,-), (-,-)``. Empty arrays if the level misses the sphere.
    """
    if not Lp > 0:
        raise DomainError("L' must be positive")
    intervals, _, _ = _valid_intervals(Lp, h)
    grid = np.linspace(-0.5 * Lp, 0.5 * Lp, n)
    cols = {"I1": [], "I2": [], "I3": [], "branch": []}
    for a, b, _ in intervals:
        nodes = np.unique(np.concatenate([[a, b], grid[(grid > a) & (grid < b)]]))
        i2sq, i3sq = level_radicands(nodes, Lp, h)
        i2 = np.sqrt(np.clip(i2sq, 0.0, None))
        i3 = np.sqrt(np.clip(i3sq, 0.0, None))
        for k, (s2, s3) in enumerate(((1, 1), (-1, 1), (1, -1), (-1, -1))):
            cols["I1"].append(nodes)
            cols["I2"].append(s2 * i2)
            cols["I3"].append(s3 * i3)
            cols["branch"].append(np.full(nodes.shape, k))
    if not cols["I1"]:
        return {k: np.array([]) for k in cols}
    return {k: np.concatenate(v) for k, v in cols.items()}


def level_components(Lp, h):
    """Number of connected components of the level set on the sphere.

    Each valid ``I1`` interval carries four sign branches; branches are glued
    where they share an endpoint (a turning point with ``I2 = 0`` or
    ``I3 = 0``), using a small union-find.
    """
    intervals, p2, p3 = _valid_intervals(Lp, h)
    if not intervals:
        return 0
    tol = 1e-10 * Lp ** 2
    parent = {}

    def find(a):
        while parent.setdefault(a, a) != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        parent[find(a)] = find(b)

    def key(x, s2, s3):
        z2 = np.polyval(p2, x) <= tol
        z3 = np.polyval(p3, x) <= tol
        return (round(x / Lp, 9), 0 if z2 else s2, 0 if z3 else s3)

    for idx, (a, b, interior) in enumerate(intervals):
        for s2 in (1, -1):
            for s3 in (1, -1):
                arc = ("arc", idx, s2, s3)
                find(arc)
                for x in [a, b] + interior:
                    union(arc, key(x, s2, s3))
    return len({find(k) for k in parent if k[0] == "arc"})


def period_estimate(eq):
    """First-order period ``2 pi / ell_dot`` of the orbit tied to an equilibrium.

    ``ell_dot = omega - omega delta/4 (1 + 2 L' I1 / (L'**2 - G'**2))``, with
    ``L'**2 - G'**2 = 4 (I1**2 + I2**2)`` on the sphere.
    """
    c = build_constants()
    point = eq.point if isinstance(eq, ReducedEquilibrium) else eq
    I1, I2, _, Lp = (float(v) for v in point)
    rad = I1 ** 2 + I2 ** 2
    if rad <= 1e-18 * Lp ** 2:
        warnings.warn("period estimate undefined at a pole of the sphere; "
                      "the cos 2g' term is dropped", RuntimeWarning, stacklevel=2)
        ratio = 0.0
    else:
        ratio = Lp * I1 / (2 * rad)
        if abs(ratio) > 1e4:
            warnings.warn("period estimate diverges near I1 = 0 at the poles",
                          RuntimeWarning, stacklevel=2)
    ell_dot = c.omega - 0.25 * c.omega * c.delta * (1 + ratio)
    return 2 * np.pi / ell_dot


def integrate_reduced(p0, t_span, t_eval=None, rtol=1e-13, atol=1e-16):
    """Integrate the reduced flow from ``p0``; returns ``(t, HopfPoint)``."""
    Lp = float(p0[3])

    def rhs(_, u):
        return reduced_flow(HopfPoint(u[0], u[1], u[2], Lp))

    sol = solve_ivp(rhs, t_span, np.array([float(v) for v in p0[:3]]), method="DOP853",
                    rtol=rtol, atol=atol, t_eval=t_eval)
    if sol.status < 0:
        raise IntegrationError(sol.message)
    return sol.t, HopfPoint(sol.y[0], sol.y[1], sol.y[2], np.full(sol.t.shape, Lp))
