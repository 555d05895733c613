"""Centre-manifold Hamiltonian and the first-order saddle-reduction map.

Centre-manifold states are arrays with a trailing axis ``(y2, z2, Y2, Z2)``.
Coefficients are kept as exact rationals multiplying ``(a*omega**2 + b)`` and
are evaluated to floats once.
"""

from fractions import Fraction as F

import numpy as np

from .linear import build_constants

# (rational, a, b, (py, pz, pY, pZ)) -> rational * (a w^2 + b) * y^py z^pz Y^pY Z^pZ
C1_TERMS = (
    (F(-27, 2), 0, 1, (2, 0, 1, 0)),
    (F(-3), 2, -5, (0, 2, 1, 0)),
    (F(1, 9), -4, 19, (0, 0, 3, 0)),
)  # times rho^2 tau / 56

C2_TERMS = (
    (F(-81, 1083488), 1322, 22707, (4, 0, 0, 0)),
    (F(27, 270872), 643, 22588, (2, 0, 2, 0)),
    (F(-27, 812), 1, -16, (1, 1, 1, 1)),
    (F(-27, 1122184), 36962, -19773, (2, 2, 0, 0)),
    (F(27, 1624), 5, 36, (2, 0, 0, 2)),
    (F(1, 2437848), 82144, -445831, (0, 0, 4, 0)),
    (F(9, 561092), 55909, -137470, (0, 2, 2, 0)),
    (F(3, 812), 1, -16, (0, 0, 2, 2)),
    (F(27, 1624), 34, -225, (0, 4, 0, 0)),
    (F(27, 812), 3, 10, (0, 2, 0, 2)),
)  # times rho

DELTA1_TERMS = (
    (F(1, 1393056), 12109, 31536, (2, 0, 0, 0)),
    (F(1, 696528), 107, 2106, (0, 0, 2, 0)),
    (F(1, 29232), 113, 918, (0, 2, 0, 0)),
    (F(1, 14616), 4, 81, (0, 0, 0, 2)),
)

DELTA2_TERMS = (
    (F(9, 38696), 13, 159, (1, 0, 1, 0)),
    (F(3, 1624), 3, 10, (0, 1, 0, 1)),
)


def _compile(terms, scale=1.0):
    w2 = build_constants().omega2
    return [(scale * float(q) * (a * w2 + b), powers) for q, a, b, powers in terms]


class _Polynomial:
    """Polynomial in (y, z, Y, Z) with float coefficients."""

    def __init__(self, terms, scale=1.0):
        self.terms = _compile(terms, scale)

    def __call__(self, cm):
        v = np.moveaxis(np.asarray(cm, dtype=float), -1, 0)
        total = 0.0
        for coef, powers in self.terms:
            mono = coef
            for var, p in zip(v, powers):
                if p:
                    mono = mono * var ** p
            total = total + mono
        return total


_c = build_constants()
_C1 = _Polynomial(C1_TERMS, _c.rho ** 2 * _c.tau / 56)
_C2 = _Polynomial(C2_TERMS, _c.rho)
delta1 = _Polynomial(DELTA1_TERMS)
delta2 = _Polynomial(DELTA2_TERMS)


def cm_terms(cm):
    """Return ``(C0, C1, C2)``; the Hamiltonian is ``C0 + C1 + C2/2``."""
    c = build_constants()
    y, z, Y, Z = np.moveaxis(np.asarray(cm, dtype=float), -1, 0)
    c0 = 0.5 * (Y * Y + c.omega2 * y * y) + 0.5 * (Z * Z + c.nu ** 2 * z * z)
    return c0, _C1(cm), _C2(cm)


def cm_hamiltonian(cm):
    c0, c1, c2 = cm_terms(cm)
    return c0 + c1 + 0.5 * c2


def detuned_split(cm):
    """Split into the 1-1 resonant oscillator and the perturbation.

    Returns ``(principal, perturbation)`` with
    ``principal = (Y2**2 + Z2**2)/2 + omega**2 (y2**2 + z2**2)/2``; the
    detuning term ``-omega**2 delta z2**2 / 2`` goes to the perturbation.
    """
    c = build_constants()
    y, z, Y, Z = np.moveaxis(np.asarray(cm, dtype=float), -1, 0)
    principal = 0.5 * (Y * Y + Z * Z) + 0.5 * c.omega2 * (y * y + z * z)
    _, c1, c2 = cm_terms(cm)
    c1_tilde = c1 - 0.5 * c.omega2 * c.delta * z * z
    return principal, c1_tilde + 0.5 * c2


def _shifts(cm):
    c = build_constants()
    d1, d2 = delta1(cm), delta2(cm)
    k = c.rho ** 2 * c.sigma
    return k * (c.lam * d1 + d2), k * (c.lam * d1 - d2)


def saddle_corrections(cm):
    """``(x1, X1)`` of a centre-manifold point (``x2 = X2 = 0``)."""
    plus, minus = _shifts(cm)
    return -plus, minus


def t3_direct(state2):
    """Subindex-2 -> subindex-1 variables, both ordered ``(x, y, z, X, Y, Z)``.

    Only the saddle pair is corrected at this order; the corrections are
    evaluated in the subindex-2 centre variables.
    """
    state2 = np.asarray(state2, dtype=float)
    plus, minus = _shifts(state2[..., [1, 2, 4, 5]])
    out = state2.copy()
    out[..., 0] = state2[..., 0] - plus
    out[..., 3] = state2[..., 3] + minus
    return out


def t3_inverse(state1):
    """Subindex-1 -> subindex-2, corrections evaluated in subindex-1 variables."""
    state1 = np.asarray(state1, dtype=float)
    plus, minus = _shifts(state1[..., [1, 2, 4, 5]])
    out = state1.copy()
    out[..., 0] = state1[..., 0] + plus
    out[..., 3] = state1[..., 3] - minus
    return out


def cm_to_decoupled(cm):
    """Embed a centre-manifold point as a full subindex-1 state."""
    cm = np.asarray(cm, dtype=float)
    state2 = np.zeros(cm.shape[:-1] + (6,))
    state2[..., [1, 2, 4, 5]] = cm
    return t3_direct(state2)
