"""Orbit synthesis from the averaged theory, differential correction and continuation.

The synthesis chain for a point of a reduced equilibrium is

    mean elements -> osculating elements -> centre manifold -> saddle
    corrections -> decoupling matrix -> local coordinates -> rotating frame

Correction and continuation work on a :class:`ShootingProblem`, a
residual/Jacobian pair whose zero set is (locally) a curve of periodic
orbits. Two problems are provided: full-period shooting with a hyperplane
phase condition, and half-period shooting between two crossings of the
fixed set of a reversing symmetry.
"""

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .center_manifold import cm_to_decoupled
from .errors import (ConvergenceError, DomainError, NumericalError,
                     SingularJacobianError, StepCollapseError)
from .hill import from_local, hamiltonian, vector_field
from .hopf import ORBIT_KINDS, find_equilibrium, from_hopf, period_estimate
from .linear import from_decoupled
from .lissajous import lissajous_to_cm, short_period_corrections
from .propagation import (J6, flow, monodromy, propagate_stm, scaled_index,
                          _write_csv)

#: Reversing symmetries of the Hill equations, acting on (px, py, pz, Px, Py, Pz).
R_XZ = np.diag([1.0, -1.0, 1.0, -1.0, 1.0, -1.0])   # fixed set: py = Px = Pz = 0
R_X = np.diag([1.0, -1.0, -1.0, -1.0, 1.0, 1.0])    # fixed set: py = pz = Px = 0


# ---------------------------------------------------------------------------
# synthesis
# ---------------------------------------------------------------------------

def _family_key(family):
    if family in ORBIT_KINDS:
        return family
    for kind, key in ORBIT_KINDS.items():
        if key == family:
            return kind
    raise DomainError(f"unknown orbit family {family!r}; expected one of {sorted(ORBIT_KINDS)}")


def synthesize_states(family, Lp, ell):
    """Rotating-frame states of the analytic orbit at mean anomalies ``ell``."""
    eq = find_equilibrium(_family_key(family), Lp)
    ell = np.atleast_1d(np.asarray(ell, dtype=float))
    mean, _ = from_hopf(eq.point, ell)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        osc = short_period_corrections(mean)
    if np.any(np.abs(osc.G) > osc.L):
        # near-circular mean orbits (halos at larger L') overshoot |G| <= L
        raise DomainError(f"first-order corrections leave the domain |G| <= L for "
                          f"{family} at L' = {Lp:g}; the series is not usable here")
    cm = lissajous_to_cm(osc)
    return from_local(from_decoupled(cm_to_decoupled(cm)))


@dataclass(frozen=True)
class SynthesizedOrbit:
    """Analytic orbit sampled uniformly in the mean anomaly."""

    family: str
    Lp: float
    phases: np.ndarray
    states: np.ndarray
    period: float
    seed_phase: float
    equilibrium: object = field(repr=False)

    @property
    def samples(self):
        return list(zip(self.phases, self.states))

    def state_at(self, ell):
        return synthesize_states(self.family, self.Lp, ell)[0]

    def seed(self, phase=None):
        """Initial condition at ``phase`` (default: the recommended phase)."""
        return self.state_at(self.seed_phase if phase is None else phase)

    def header(self):
        return {"family": self.family, "Lp": self.Lp, "period": self.period,
                "seed_phase": self.seed_phase, "ic": self.seed().tolist(),
                "n_samples": len(self.phases)}

    def to_csv(self, target):
        rows = np.column_stack([self.phases, self.states])
        _write_csv(target, ["ell", "px", "py", "pz", "Px", "Py", "Pz"], rows)


def recommended_seed(family):
    """Mean anomaly giving the best correction seed: pi for planar Lyapunov, else 0."""
    return np.pi if _family_key(family) == "planar-lyapunov" else 0.0


def synthesize(family, Lp, n_samples=256, seed_phase=None):
    """Sample the analytic orbit of ``family`` at ``L' = Lp``.

    ``family`` is an orbit kind (``'vertical-lyapunov'``, ``'halo-north'``,
    ...) or an equilibrium label (``'E+1'``, ...). Raises
    :class:`FamilyNotPresentError` if the family does not exist at ``Lp``.
    """
    if n_samples < 1:
        raise DomainError("n_samples must be positive")
    kind = _family_key(family)
    eq = find_equilibrium(kind, Lp)
    phases = np.linspace(0.0, 2 * np.pi, n_samples, endpoint=False)
    states = synthesize_states(kind, Lp, phases)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        period = float(period_estimate(eq))
    if seed_phase is None:
        seed_phase = recommended_seed(kind)
    return SynthesizedOrbit(kind, float(Lp), phases, states, period, float(seed_phase), eq)


def periodicity_error(ic, period, tol=1e-12):
    """``|Phi_T(ic) - ic|`` for the exact Hill flow."""
    ic = np.asarray(ic, dtype=float)
    return float(np.linalg.norm(flow(ic, period, tol) - ic))


# ---------------------------------------------------------------------------
# shooting problems
# ---------------------------------------------------------------------------

class ShootingProblem:
    """Unknowns ``v``, residual ``F(v)`` and its Jacobian.

    Subclasses define :meth:`evaluate`, :meth:`unpack` (``v -> (ic, period)``)
    and :meth:`pack`. ``F`` has one equation fewer than the independent
    unknowns so that its zero set is a curve.
    """

    tol = 1e-12

    def evaluate(self, v):
        raise NotImplementedError

    def unpack(self, v):
        raise NotImplementedError

    def pack(self, ic, period):
        raise NotImplementedError

    def periodicity(self, v):
        """Norm of the full-period mismatch, the reported residual."""
        ic, period = self.unpack(v)
        return periodicity_error(ic, period, self.tol)


class FullPeriodProblem(ShootingProblem):
    """``v = (ic, T)``; ``F = (Phi_T(ic) - ic, n . (ic - anchor))``.

    The phase condition fixes the hyperplane through ``anchor`` with normal
    ``normal``. The six periodicity equations are dependent (energy is
    conserved), so the Jacobian has a one-dimensional kernel along the family.
    """

    def __init__(self, anchor, normal, tol=1e-12, planar=False):
        self.anchor = np.asarray(anchor, dtype=float)
        self.normal = np.asarray(normal, dtype=float)
        self.tol = tol
        self.planar = planar

    def unpack(self, v):
        return v[:6], v[6]

    def pack(self, ic, period):
        return np.append(np.asarray(ic, dtype=float), period)

    def evaluate(self, v):
        ic, T = self.unpack(v)
        end, phi = propagate_stm(ic, T, self.tol)
        F = np.append(end - ic, self.normal @ (ic - self.anchor))
        D = np.zeros((7, 7))
        D[:6, :6] = phi - np.eye(6)
        D[:6, 6] = vector_field(end)
        D[6, :6] = self.normal
        return F, D

    def periodicity(self, v):
        F, _ = self.evaluate(v)
        return float(np.linalg.norm(F[:6]))


class SymmetricProblem(ShootingProblem):
    """Half-period shooting between two crossings of ``Fix(R)``.

    ``v`` holds the components of the initial state left free by ``R``
    (restricted to the plane for planar problems) and the half period.
    ``F`` is the part of ``Phi_{T/2}(ic)`` that must vanish on ``Fix(R)``.
    """

    def __init__(self, R, tol=1e-12, planar=False):
        self.R = np.asarray(R, dtype=float)
        diag = np.diag(self.R)
        self.free = [i for i in range(6) if diag[i] > 0 and not (planar and i in (2, 5))]
        self.target = [i for i in range(6) if diag[i] < 0 and not (planar and i in (2, 5))]
        self.tol = tol
        self.planar = planar

    def unpack(self, v):
        ic = np.zeros(6)
        ic[self.free] = v[:-1]
        return ic, 2.0 * v[-1]

    def pack(self, ic, period):
        ic = np.asarray(ic, dtype=float)
        return np.append(ic[self.free], 0.5 * period)

    def evaluate(self, v):
        ic, T = self.unpack(v)
        end, phi = propagate_stm(ic, 0.5 * T, self.tol)
        F = end[self.target]
        D = np.column_stack([phi[np.ix_(self.target, self.free)], vector_field(end)[self.target]])
        return F, D

    def periodicity(self, v):
        ic, T = self.unpack(v)
        end, _ = propagate_stm(ic, 0.5 * T, self.tol)
        # the second half is the R-image of the first, reversed in time
        return float(np.linalg.norm(self.R @ end - end))


def _newton(problem, v0, extra, tol, max_iter, name="corrector"):
    """Newton iteration on ``F(v) = 0`` augmented by ``extra(v) -> (g, dg)``.

    Steps are least-squares solutions. Returns ``(v, F, D, iterations)``.
    """
    v = np.asarray(v0, dtype=float).copy()
    norms = []
    for it in range(max_iter + 1):
        F, D = problem.evaluate(v)
        rows = [F]
        jac = [D]
        if extra is not None:
            g, dg = extra(v)
            rows.append(np.atleast_1d(g))
            jac.append(np.atleast_2d(dg))
        Ft, Dt = np.concatenate(rows), np.vstack(jac)
        norm = float(np.linalg.norm(Ft))
        norms.append(norm)
        if norm <= tol:
            return v, F, D, it
        if it == max_iter:
            break
        if len(norms) >= 4 and norms[-1] > norms[-2] > norms[-3] > norms[-4]:
            raise ConvergenceError(f"{name} diverged: residual grew three times in a row "
                                   f"({norms[-4]:.3g} -> {norm:.3g})")
        sv = np.linalg.svd(Dt, compute_uv=False)
        if sv[-1] <= 1e-14 * sv[0] and Dt.shape[0] >= Dt.shape[1]:
            raise SingularJacobianError(f"{name}: Newton matrix is singular "
                                        f"(condition {sv[0] / max(sv[-1], 1e-300):.3g})")
        step = np.linalg.lstsq(Dt, -Ft, rcond=None)[0]
        v = v + step
    raise ConvergenceError(f"{name} did not reach {tol:g} in {max_iter} iterations "
                           f"(last residual {norms[-1]:.3g})")


# ---------------------------------------------------------------------------
# periodic orbits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PeriodicOrbit:
    ic: np.ndarray
    period: float
    energy: float
    s1: float
    s2: float
    residual: float
    iterations: int = 0
    family: str = ""
    Lp: float = float("nan")
    planar: bool = False

    def as_dict(self):
        Lp = None if np.isnan(self.Lp) else self.Lp
        return {"family": self.family, "Lp": Lp, "ic": [float(v) for v in self.ic],
                "period": self.period, "energy": self.energy, "s1": self.s1,
                "s2": self.s2, "residual": self.residual}

    def to_json(self):
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, record):
        ic = np.asarray(record["ic"], dtype=float)
        if ic.shape != (6,):
            raise DomainError("orbit record must hold a six-component 'ic'")
        planar = abs(ic[2]) < 1e-14 and abs(ic[5]) < 1e-14
        nan = float("nan")
        return cls(ic, float(record["period"]), float(record.get("energy", hamiltonian(ic))),
                   float(record.get("s1", nan)), float(record.get("s2", nan)),
                   float(record.get("residual", nan)), 0, record.get("family", ""),
                   nan if record.get("Lp") is None else float(record["Lp"]),
                   planar)


def detect_symmetry(ic, atol=1e-12):
    """Reversing symmetry whose fixed set contains ``ic`` (``R_XZ``, ``R_X`` or None)."""
    ic = np.asarray(ic, dtype=float)
    for R in (R_XZ, R_X):
        if np.all(np.abs(ic[np.diag(R) < 0]) <= atol):
            return R
    return None


def _phase_normal(ic, index=None):
    if index is None:
        vel = vector_field(ic)[:3]
        index = int(np.argmax(np.abs(vel)))
    normal = np.zeros(6)
    normal[index] = 1.0
    return normal


def _make_problem(ic, symmetric, tol, phase_index=None):
    ic = np.asarray(ic, dtype=float)
    planar = abs(ic[2]) < 1e-14 and abs(ic[5]) < 1e-14
    if symmetric is None:
        symmetric = detect_symmetry(ic)
    if symmetric is not False and symmetric is not None:
        R = detect_symmetry(ic) if symmetric is True else np.asarray(symmetric)
        if R is None:
            raise DomainError("seed is not on the fixed set of a reversing symmetry")
        return SymmetricProblem(R, tol, planar=planar)
    return FullPeriodProblem(ic, _phase_normal(ic, phase_index), tol, planar=planar)


def _constraint(problem, kind, value):
    if kind is None:
        return None
    if kind == "energy":
        def extra(v):
            ic, _ = problem.unpack(v)
            grad = -J6 @ vector_field(ic)   # dH = -J f
            dv = np.zeros(len(v))
            if isinstance(problem, SymmetricProblem):
                dv[:-1] = grad[problem.free]
            else:
                dv[:6] = grad
            return hamiltonian(ic) - value, dv
        return extra
    if kind == "period":
        def extra(v):
            dv = np.zeros(len(v))
            dv[-1] = 1.0
            _, T = problem.unpack(v)
            scale = 0.5 if isinstance(problem, SymmetricProblem) else 1.0
            return scale * (T - value), dv
        return extra
    raise DomainError(f"constraint must be 'energy', 'period' or None, not {kind!r}")


def _finish(problem, v, iterations, family="", Lp=float("nan"), symmetric_R=None):
    ic, T = problem.unpack(v)
    R = problem.R if isinstance(problem, SymmetricProblem) else None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        mono = monodromy(ic, T, problem.tol, planar=problem.planar, symmetric_half=R)
    return PeriodicOrbit(np.array(ic), float(T), float(hamiltonian(ic)), mono.s1, mono.s2,
                         problem.periodicity(v), iterations, family, Lp, problem.planar)


def correct(ic, period_guess, constraint="energy", target=None, tol=1e-12,
            max_iter=15, symmetric=None, phase_index=None, int_tol=1e-12,
            family="", Lp=float("nan")):
    """Differential correction of an approximate periodic orbit.

    Parameters
    ----------
    ic, period_guess
        Seed state and period.
    constraint : {'energy', 'period', None}
        Quantity held at ``target`` (default: its value at the seed).
    tol
        Convergence threshold on the norm of the augmented residual.
    symmetric : bool, ndarray or None
        Shoot over half a period between crossings of the fixed set of a
        reversing symmetry (``True`` detects it from the seed, which must lie
        on that set; an array gives the symmetry). ``None`` uses half-period
        shooting whenever the seed is symmetric, ``False`` never.
    phase_index
        Coordinate fixed by the phase condition of full-period shooting;
        default: the position component with the largest velocity.

    Raises
    ------
    ConvergenceError
        Growing residual for three consecutive iterations, or ``max_iter``
        exceeded.
    SingularJacobianError
        Rank-deficient Newton matrix (typically at a bifurcation).
    """
    ic = np.asarray(ic, dtype=float)
    if not period_guess > 0:
        raise DomainError("period guess must be positive")
    if np.linalg.norm(vector_field(ic)) < 1e-12:
        raise DomainError("seed is an equilibrium")
    problem = _make_problem(ic, symmetric, int_tol, phase_index)
    v0 = problem.pack(ic, period_guess)
    if target is None and constraint is not None:
        target = hamiltonian(ic) if constraint == "energy" else period_guess
    v, _, _, it = _newton(problem, v0, _constraint(problem, constraint, target), tol, max_iter)
    return _finish(problem, v, it, family, Lp)


# ---------------------------------------------------------------------------
# continuation
# ---------------------------------------------------------------------------

def _tangent(D, previous=None):
    t = np.linalg.svd(D)[2][-1]
    if previous is not None and t @ previous < 0:
        t = -t
    return t


def continue_family(seed, n_members, direction=1, step=1e-2, min_step=1e-7, max_step=0.2,
                    symmetric=None, tol=1e-12, int_tol=1e-12, max_iter=8,
                    stop=None, callback=None):
    """Pseudo-arclength continuation of a family of periodic orbits.

    Parameters
    ----------
    seed : PeriodicOrbit
        Corrected starting member (residual at most ``1e-10``).
    n_members
        Number of new members to compute.
    direction
        +1 or -1, relative to the direction in which the energy grows.
    step
        Initial arclength step in the shooting unknowns; halved on failure and
        grown by 1.5 after fast convergence.
    symmetric
        As in :func:`correct`; default: use half-period shooting when the
        seed lies on a symmetry fixed set.
    stop
        Optional predicate on a new member that ends the continuation.

    Returns the list of members, starting with ``seed``.
    """
    if not seed.residual <= 1e-10:
        raise DomainError("continuation seed must be corrected (residual <= 1e-10)")
    ic = seed.ic
    problem = _make_problem(ic, symmetric, int_tol)
    v = problem.pack(ic, seed.period)
    F, D = problem.evaluate(v)
    t = _tangent(D)
    # orient by energy growth
    probe_ic, _ = problem.unpack(v + 1e-6 * t)
    if np.sign(hamiltonian(probe_ic) - seed.energy) != np.sign(direction):
        t = -t
    members = [seed]
    h = step
    while len(members) <= n_members:
        pred = v + h * t
        if isinstance(problem, FullPeriodProblem):
            # phase plane through the current member, normal to its velocity
            ic_now, _ = problem.unpack(v)
            vel = vector_field(ic_now)
            problem = FullPeriodProblem(ic_now, vel / np.linalg.norm(vel), int_tol, problem.planar)

        def arclength(w, pred=pred, t=t):
            return t @ (w - pred), t

        try:
            w, F, D, it = _newton(problem, pred, arclength, tol, max_iter, "continuation")
        except NumericalError:
            h *= 0.5
            if h < min_step:
                raise StepCollapseError(f"continuation step fell below {min_step:g} after "
                                        f"{len(members) - 1} members")
            continue
        new_t = _tangent(D, t)
        member = _finish(problem, w, it, seed.family, seed.Lp)
        members.append(member)
        if callback is not None:
            callback(member)
        v, t = w, new_t
        if it <= 3:
            h = min(1.5 * h, max_step)
        if stop is not None and stop(member):
            break
    return members


def family_rows(members):
    """``(energy, period, s1_scaled, s2_scaled)`` per member."""
    return np.array([[m.energy, m.period, scaled_index(m.s1), scaled_index(m.s2)]
                     for m in members])


def family_to_csv(members, target):
    _write_csv(target, ["energy", "period", "s1_scaled", "s2_scaled"], family_rows(members))


# ---------------------------------------------------------------------------
# bifurcations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Bifurcation:
    energy: float
    index: str
    direction: str
    value: float

    def as_tuple(self):
        return (self.energy, self.index, self.direction)


def _crossing_value(orbit, index):
    s = orbit.s1 if index == "s1" else orbit.s2
    return abs(s) - 2.0


def locate_bifurcations(members, refine=True, energy_tol=1e-4, int_tol=1e-12):
    """Energies where a stability index crosses ``|s| = 2``.

    Sign changes of ``|s_i| - 2`` between consecutive members are refined by
    bisection in energy (each midpoint corrected at fixed energy from the
    interpolated member) until the bracket is narrower than ``energy_tol``.
    Returns a list of :class:`Bifurcation` sorted by energy; ``direction`` is
    ``'stable-to-unstable'`` or ``'unstable-to-stable'`` along the list order
    and ``value`` is the sign of the index at the crossing (+2 or -2).
    """
    found = []
    for a, b in zip(members[:-1], members[1:]):
        for index in ("s1", "s2"):
            fa, fb = _crossing_value(a, index), _crossing_value(b, index)
            if fa == 0.0 or np.sign(fa) == np.sign(fb):
                continue
            direction = "stable-to-unstable" if fa < 0 else "unstable-to-stable"
            lo, hi = a, b
            if refine:
                lo, hi = _bisect(a, b, index, energy_tol, int_tol)
            wa = abs(_crossing_value(lo, index))
            wb = abs(_crossing_value(hi, index))
            # linear interpolation inside the final bracket
            energy = lo.energy + (hi.energy - lo.energy) * wa / max(wa + wb, 1e-300)
            s_lo = lo.s1 if index == "s1" else lo.s2
            found.append(Bifurcation(float(energy), index, direction, float(np.sign(s_lo) * 2.0)))
    return sorted(found, key=lambda b: b.energy)


def _bisect(a, b, index, energy_tol, int_tol):
    fa = _crossing_value(a, index)
    for _ in range(60):
        if abs(b.energy - a.energy) <= energy_tol:
            break
        e_mid = 0.5 * (a.energy + b.energy)
        seed = 0.5 * (a.ic + b.ic)
        try:
            mid = correct(seed, 0.5 * (a.period + b.period), constraint="energy", target=e_mid,
                          symmetric=detect_symmetry(seed) is not None, int_tol=int_tol,
                          max_iter=10, family=a.family, Lp=a.Lp)
        except NumericalError:
            break
        if not min(a.energy, b.energy) <= mid.energy <= max(a.energy, b.energy):
            break
        fm = _crossing_value(mid, index)
        if np.sign(fm) == np.sign(fa):
            a, fa = mid, fm
        else:
            b = mid
    return a, b


def planar_lyapunov_seed(amplitude=1e-3, tol=1e-12):
    """Small planar Lyapunov orbit from the linear flow about L1, corrected.

    The seed starts on the x axis (``py = Px = 0``) and is refined by
    half-period symmetric shooting at its own energy, starting from the
    linear period ``2 pi / omega``.
    """
    from .linear import build_constants
    from .hill import libration_points

    c = build_constants()
    # quarter period into the linear centre oscillation: y = X = 0
    local = -amplitude * np.asarray(c.A)[:, 3]
    state = libration_points()[0] + np.array([local[0], 0.0, 0.0, 0.0, local[3], 0.0])
    return correct(state, 2 * np.pi / c.omega, constraint="energy", symmetric=R_XZ,
                   int_tol=tol, family="planar-lyapunov")
