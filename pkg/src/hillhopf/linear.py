"""Linear dynamics about L1 and the constants shared by the whole theory.

The symplectic form is written with coordinates first, ``(x, y, X, Y)``,
i.e. ``J = [[0, I], [-I, 0]]``.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import NumericalError
from .hill import RHO

#: Matrix of the planar linear system ``d(x, y, X, Y)/dt = M1 (x, y, X, Y)``.
M1 = np.array([
    [0.0, 1.0, 1.0, 0.0],
    [-1.0, 0.0, 0.0, 1.0],
    [8.0, 0.0, 0.0, 1.0],
    [0.0, -4.0, -1.0, 0.0],
])

J4 = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])


@dataclass(frozen=True)
class ModelConstants:
    """Every constant of the perturbation theory, evaluated once.

    ``sigma`` and ``tau`` normalise the saddle and centre columns of the
    decoupling matrix ``A`` so that ``A.T @ J @ A == J``. ``k0``..``k4``
    are the coefficients of the normalised Hamiltonian.
    """

    rho: float
    lam: float
    omega: float
    nu: float
    delta: float
    delta_star: float
    sigma: float
    tau: float
    k0: float
    k1: float
    k2: float
    k3: float
    k4: float
    A: np.ndarray = field(repr=False)
    A_inv: np.ndarray = field(repr=False)

    @property
    def omega2(self):
        return self.omega ** 2

    def as_dict(self):
        out = {k: getattr(self, k) for k in (
            "rho", "lam", "omega", "nu", "delta", "delta_star", "sigma", "tau",
            "k0", "k1", "k2", "k3", "k4")}
        out["A"] = self.A.tolist()
        return out


def _unscaled_columns(lam, w2):
    # columns of A before dividing by sigma (1st, 3rd) or tau (2nd, 4th)
    return (
        np.array([2 * lam, lam ** 2 - 9, lam ** 2 + 9, lam * (lam ** 2 - 7)]),
        np.array([0.0, -(w2 + 9), 9 - w2, 0.0]),
        np.array([-2 * lam, lam ** 2 - 9, lam ** 2 + 9, lam * (7 - lam ** 2)]),
        np.array([2.0, 0.0, 0.0, -(w2 + 7)]),
    )


@lru_cache(maxsize=None)
def build_constants():
    """Return the (cached, immutable) :class:`ModelConstants`."""
    s7 = np.sqrt(7.0)
    lam = np.sqrt(2 * s7 + 1)
    omega = np.sqrt(2 * s7 - 1)
    w2 = omega ** 2
    nu = 2.0
    delta = (23 - 8 * s7) / 27
    delta_star = 0.5 * delta * (1 + 0.25 * delta)

    c1, c2, c3, c4 = _unscaled_columns(lam, w2)
    sigma2 = c1 @ J4 @ c3
    tau2 = c2 @ J4 @ c4
    if sigma2 <= 0 or tau2 <= 0:
        raise NumericalError("no positive (sigma, tau) makes the decoupling canonical")
    sigma, tau = np.sqrt(sigma2), np.sqrt(tau2)
    A = np.column_stack([c1 / sigma, c2 / tau, c3 / sigma, c4 / tau])
    A.setflags(write=False)
    A_inv = -J4 @ A.T @ J4
    A_inv.setflags(write=False)

    k0 = (w2 + 2) * RHO / 6733104
    k1 = (6829135 - 609646 * w2) * k0 / 16
    k2 = (126184 - 9583 * w2) * k0
    k3 = -0.75 * (439957 - 103954 * w2) * k0
    k4 = 0.75 * (7293079 - 1280862 * w2) * k0
    return ModelConstants(
        rho=RHO, lam=lam, omega=omega, nu=nu, delta=delta, delta_star=delta_star,
        sigma=sigma, tau=tau, k0=k0, k1=k1, k2=k2, k3=k3, k4=k4, A=A, A_inv=A_inv)


def linear_eigenstructure():
    """Eigenvalues of ``M1``, ordered ``(+lam, -lam, +i omega, -i omega)``."""
    ev = np.linalg.eigvals(M1)
    real = sorted(ev[np.abs(ev.imag) < 1e-9], key=lambda v: -v.real)
    imag = sorted(ev[np.abs(ev.imag) >= 1e-9], key=lambda v: -v.imag)
    return np.array(real + imag)


def _apply(matrix, state):
    state = np.asarray(state, dtype=float)
    planar = state[..., [0, 1, 3, 4]]
    out = state.copy()
    out[..., [0, 1, 3, 4]] = planar @ matrix.T
    return out


def to_decoupled(local, constants=None):
    """``(x, y, z, X, Y, Z) -> (x1, y1, z1, X1, Y1, Z1)``; z and Z pass through."""
    c = constants or build_constants()
    return _apply(c.A_inv, local)


def from_decoupled(decoupled, constants=None):
    """``(x, y, X, Y) = A (x1, y1, X1, Y1)``; z and Z pass through."""
    c = constants or build_constants()
    return _apply(c.A, decoupled)


def decoupled_quadratic_hamiltonian(decoupled, constants=None):
    """``lam x1 X1 + (Y1**2 + omega**2 y1**2)/2 + (Z1**2 + nu**2 z1**2)/2``."""
    c = constants or build_constants()
    x, y, z, X, Y, Z = np.moveaxis(np.asarray(decoupled, dtype=float), -1, 0)
    return c.lam * x * X + 0.5 * (Y * Y + c.omega2 * y * y) + 0.5 * (Z * Z + c.nu ** 2 * z * z)
