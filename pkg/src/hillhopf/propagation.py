"""Numerical propagation of the Hill equations and their variational system.

Integration uses scipy's ``DOP853`` (explicit Runge-Kutta of order 8 with
an embedded error estimate and order-7 dense output).
"""

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import CollisionError, DomainError, IntegrationError
from .hill import hamiltonian, vector_field

R_MIN = 1e-3
J6 = np.block([[np.zeros((3, 3)), np.eye(3)], [-np.eye(3), np.zeros((3, 3))]])
PLANAR = [0, 1, 3, 4]


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution with a dense interpolant over ``[times[0], times[-1]]``."""

    times: np.ndarray
    states: np.ndarray
    dense: object = field(repr=False)

    def __call__(self, t):
        return self.dense(t).T

    @property
    def energy(self):
        return hamiltonian(self.states)

    def to_csv(self, path_or_file):
        rows = np.column_stack([self.times, self.states, self.energy])
        _write_csv(path_or_file, ["t", "px", "py", "pz", "Px", "Py", "Pz", "H"], rows)


def _write_csv(target, header, rows):
    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])

    if hasattr(target, "write"):
        emit(target)
    else:
        with open(target, "w", newline="") as fh:
            emit(fh)


def _check_tol(tol):
    if not 1e-14 <= tol <= 1e-6:
        raise DomainError(f"tolerance {tol} outside [1e-14, 1e-6]")


def _collision_event(r_min, offset=0):
    def event(_, u):
        return u[offset] ** 2 + u[offset + 1] ** 2 + u[offset + 2] ** 2 - r_min ** 2

    event.terminal = True
    event.direction = -1
    return event


def _solve(rhs, u0, t_end, tol, r_min, t_eval=None, dense=False):
    u0 = np.asarray(u0, dtype=float)
    if np.linalg.norm(u0[:3]) < r_min:
        raise CollisionError(f"initial state inside the collision radius {r_min}")
    sol = solve_ivp(rhs, (0.0, float(t_end)), u0, method="DOP853", rtol=tol, atol=tol,
                    t_eval=t_eval, dense_output=dense, events=_collision_event(r_min))
    if sol.status == 1:
        raise CollisionError(f"trajectory reached R < {r_min} at t = {sol.t_events[0][0]:.6g}")
    if sol.status < 0:
        raise IntegrationError(sol.message)
    return sol


def _rhs(_, u):
    return vector_field(u)


def propagate(s0, t_end, tol=1e-12, r_min=R_MIN, t_eval=None):
    """Integrate a rotating-frame state from ``t = 0`` to ``t_end``.

    ``t_end`` may be negative (backward integration). Raises
    :class:`CollisionError` when the distance to the primary drops below
    ``r_min``.
    """
    _check_tol(tol)
    sol = _solve(_rhs, s0, t_end, tol, r_min, t_eval=t_eval, dense=True)
    return Trajectory(sol.t, sol.y.T.copy(), sol.sol)


def flow(s0, t_end, tol=1e-12, r_min=R_MIN):
    """Final state only."""
    _check_tol(tol)
    return _solve(_rhs, s0, t_end, tol, r_min).y[:, -1].copy()


def _variational_rhs(_, u):
    px, py, pz = u[0], u[1], u[2]
    r2 = px * px + py * py + pz * pz
    r = np.sqrt(r2)
    r3 = 1.0 / (r2 * r)
    r5 = 3.0 * r3 / r2
    out = np.empty(42)
    out[:6] = vector_field(u[:6])
    phi = u[6:].reshape(6, 6)
    q, p = phi[:3], phi[3:]
    pos = np.array([px, py, pz])
    # potential Hessian times the position block
    hq = r5 * np.outer(pos, pos @ q) - r3 * q
    hq[0] += 2.0 * q[0]
    hq[1] -= q[1]
    hq[2] -= q[2]
    dq = p.copy()
    dq[0] += q[1]
    dq[1] -= q[0]
    dp = hq
    dp[0] += p[1]
    dp[1] -= p[0]
    out[6:24] = dq.ravel()
    out[24:] = dp.ravel()
    return out


def propagate_stm(s0, t_end, tol=1e-12, r_min=R_MIN):
    """Final state and 6x6 state-transition matrix after ``t_end``."""
    _check_tol(tol)
    u0 = np.concatenate([np.asarray(s0, dtype=float), np.eye(6).ravel()])
    sol = _solve(_variational_rhs, u0, t_end, tol, r_min)
    u = sol.y[:, -1]
    return u[:6].copy(), u[6:].reshape(6, 6).copy()


def symplectic_inverse(phi):
    """Inverse of a symplectic matrix, ``-J phi^T J``."""
    return -J6 @ phi.T @ J6


def stability_indices(M, planar=False):
    """Two nontrivial stability indices ``lambda + 1/lambda`` of a monodromy matrix.

    With ``planar`` the indices come from the block structure: the in-plane
    one is ``trace(M_planar) - 2`` and the out-of-plane one the trace of the
    ``(z, Pz)`` block. Otherwise the unit pair is deflated and the remaining
    eigenvalues are paired by reciprocity. Returns ``(s1, s2, flags)``.
    """
    M = np.asarray(M, dtype=float)
    flags = []
    if planar:
        s_in = np.trace(M[np.ix_(PLANAR, PLANAR)]) - 2.0
        s_out = M[2, 2] + M[5, 5]
        return float(s_in), float(s_out), flags
    ev = list(np.linalg.eigvals(M))
    for _ in range(2):
        k = int(np.argmin([abs(v - 1.0) for v in ev]))
        ev.pop(k)
    ev.sort(key=lambda v: -abs(v))
    a = ev[0]
    b = min(ev[1:], key=lambda v: abs(v * a - 1.0))
    rest = [v for v in ev[1:] if v is not b]
    pairs = [(a, b)]
    c = rest[0]
    pairs.append((c, rest[1]))
    out = []
    for u, v in pairs:
        s = u + v
        if abs(s.imag) > 1e-6 * max(1.0, abs(s)):
            flags.append("complex-quadruplet")
        out.append(float(s.real))
    out.sort(key=lambda s: -abs(s))
    return out[0], out[1], flags


def scaled_index(s):
    """Plot scaling ``2 asinh(s) / asinh(2)``; maps +-2 to +-2."""
    return 2.0 * np.arcsinh(s) / np.arcsinh(2.0)


@dataclass(frozen=True)
class Monodromy:
    M: np.ndarray
    s1: float
    s2: float
    period: float
    eigenvalues: np.ndarray
    flags: tuple = ()

    @property
    def det(self):
        return float(np.linalg.det(self.M))

    def symplectic_defect(self):
        return float(np.abs(self.M.T @ J6 @ self.M - J6).max())


def monodromy(orbit_ic, period, tol=1e-12, planar=None, symmetric_half=None):
    """State-transition matrix over one period and its stability indices.

    ``planar`` defaults to whether the orbit lies in ``z = Pz = 0``. With
    ``symmetric_half`` set to a reversing matrix ``R`` the orbit is integrated
    only over half a period and ``M = R Phi_h^{-1} R Phi_h``.
    """
    ic = np.asarray(orbit_ic, dtype=float)
    if planar is None:
        planar = abs(ic[2]) < 1e-14 and abs(ic[5]) < 1e-14
    if symmetric_half is not None:
        end, phi = propagate_stm(ic, 0.5 * period, tol)
        R = symmetric_half
        M = R @ symplectic_inverse(phi) @ R @ phi
        # a symmetric orbit crosses Fix(R) again at half period
        mismatch = np.linalg.norm(R @ end - end)
    else:
        end, M = propagate_stm(ic, period, tol)
        mismatch = np.linalg.norm(end - ic)
    if mismatch > 1e-6:
        warnings.warn(f"state is not periodic: |x(T) - x(0)| = {mismatch:.3g}",
                      RuntimeWarning, stacklevel=2)
    s1, s2, flags = stability_indices(M, planar=planar)
    return Monodromy(M, s1, s2, float(period), np.linalg.eigvals(M), tuple(flags))
