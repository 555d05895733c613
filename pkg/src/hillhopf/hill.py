"""Hill problem in rotating coordinates.

States are arrays whose last axis has length 6, ordered
``(px, py, pz, Px, Py, Pz)``: position and the conjugate momenta (inertial
velocity components). Units are Hill units (length mu^(1/3), time 1/N).

Local states, centred at the L1 libration point, use the order
``(x, y, z, X, Y, Z)``.
"""

from math import factorial

import numpy as np

from .errors import DomainError, SingularityError

#: Hill radius, distance of the libration points from the origin.
RHO = 3.0 ** (-1.0 / 3.0)


def _split(state):
    state = np.asarray(state, dtype=float)
    if state.shape[-1] != 6:
        raise DomainError(f"expected a trailing axis of length 6, got shape {state.shape}")
    return np.moveaxis(state, -1, 0)


def _radius(px, py, pz):
    R = np.sqrt(px * px + py * py + pz * pz)
    if np.any(R == 0.0):
        raise SingularityError("R = 0: the Hill Hamiltonian is singular at the origin")
    return R


def hamiltonian(state):
    """Energy of a rotating-frame state (scalar or batch)."""
    px, py, pz, Px, Py, Pz = _split(state)
    R = _radius(px, py, pz)
    return (0.5 * (Px * Px + Py * Py + Pz * Pz) + Px * py - px * Py
            - 1.0 / R + 0.5 * (R * R - 3.0 * px * px))


def vector_field(state):
    """Time derivative of a rotating-frame state."""
    px, py, pz, Px, Py, Pz = _split(state)
    R = _radius(px, py, pz)
    r3 = 1.0 / R ** 3
    return np.stack([
        Px + py,
        Py - px,
        Pz,
        -r3 * px + 2.0 * px + Py,
        -r3 * py - py - Px,
        -r3 * pz - pz,
    ], axis=-1)


def jacobian(state):
    """6x6 Jacobian of :func:`vector_field` at a single state."""
    px, py, pz, *_ = np.asarray(state, dtype=float)
    p = np.array([px, py, pz])
    R = _radius(px, py, pz)
    hess = 3.0 * np.outer(p, p) / R ** 5 - np.eye(3) / R ** 3
    hess += np.diag([2.0, -1.0, -1.0])
    jac = np.zeros((6, 6))
    jac[0, 1], jac[1, 0] = 1.0, -1.0
    jac[0:3, 3:6] = np.eye(3)
    jac[3:6, 0:3] = hess
    jac[3, 4], jac[4, 3] = 1.0, -1.0
    return jac


def libration_points():
    """The two equilibria ``L1 = (rho, 0, 0, 0, rho, 0)`` and ``L2 = -L1``."""
    l1 = np.array([RHO, 0.0, 0.0, 0.0, RHO, 0.0])
    return l1, -l1


def to_local(state):
    """Translate the origin to L1: rotating state -> ``(x, y, z, X, Y, Z)``."""
    shift = libration_points()[0]
    return np.asarray(state, dtype=float) - shift


def from_local(local):
    """Inverse of :func:`to_local`."""
    shift = libration_points()[0]
    return np.asarray(local, dtype=float) + shift


def solid_legendre(n, x, r2):
    """``r**n * P_n(x / r)`` as a polynomial in ``x`` and ``r**2``.

    Uses the three-term recurrence
    ``(k+1) Q_{k+1} = (2k+1) x Q_k - k r^2 Q_{k-1}``, so ``r = 0`` is regular.
    """
    x = np.asarray(x, dtype=float)
    q_prev, q = np.ones_like(x), x
    if n == 0:
        return q_prev
    for k in range(1, n):
        q_prev, q = q, ((2 * k + 1) * x * q - k * r2 * q_prev) / (k + 1)
    return q


def legendre(n, u):
    """Legendre polynomial ``P_n(u)`` by the standard recurrence."""
    return solid_legendre(n, u, np.ones_like(np.asarray(u, dtype=float)))


def quadratic_hamiltonian(local):
    """Quadratic part of the Hamiltonian about L1 (linear dynamics)."""
    x, y, z, X, Y, Z = _split(local)
    return (0.5 * (X * X + Y * Y) - (x * Y - X * y) + 2.0 * (y * y - 2.0 * x * x)
            + 0.5 * (Z * Z + 4.0 * z * z))


def perturbation_term(n, local):
    """Degree ``n + 2`` term ``H_n`` of the expansion about L1, ``n >= 1``.

    ``H_n = -(-1)**n (n!/rho) (r/rho)**(n+2) P_{n+2}(x/r)``. The alternating
    sign comes from expanding ``1/|(rho + x, y, z)|`` about ``x = 0``; the
    expansion enters the Hamiltonian as ``sum H_n / n!``.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"perturbation order must be an integer >= 1, got {n!r}")
    n = int(n)
    x, y, z, *_ = _split(local)
    r2 = x * x + y * y + z * z
    sign = -1.0 if n % 2 == 0 else 1.0
    return sign * factorial(n) / RHO ** (n + 3) * solid_legendre(n + 2, x, r2)


def expanded_hamiltonian(local, order=2):
    """Truncated expansion ``H_0 + sum_{n=1}^{order} H_n / n!`` about L1.

    Differs from ``hamiltonian(from_local(local)) - hamiltonian(L1)`` by
    ``O(r**(order + 3))``.
    """
    if order < 0:
        raise DomainError("truncation order must be >= 0")
    total = quadratic_hamiltonian(local)
    for n in range(1, order + 1):
        total = total + perturbation_term(n, local) / factorial(n)
    return total
