"""Lissajous variables, the Hamiltonian in those variables, and its averaging.

A :class:`LissajousState` ``(ell, g, L, G)`` holds the elliptic anomaly, the
orientation angle and their conjugate momenta. Fields may be arrays of any
broadcast-compatible shapes. The same type carries mean (averaged) elements
when passed to :func:`normalized_hamiltonian` or
:func:`short_period_corrections`.

Coefficient tables are stored as data. A table term
``(q, a, b, pd, ps)`` stands for ``q * (a*omega**2 + b) * d**pd * s**ps``.
"""

import warnings
from fractions import Fraction as F
from typing import NamedTuple

import numpy as np

from .errors import DegenerateStateError, DomainError
from .linear import build_constants


class LissajousState(NamedTuple):
    ell: object
    g: object
    L: object
    G: object


# ---------------------------------------------------------------------------
# Hamiltonian coefficients Q_{n,j,k}, keyed by (n, j, k).
#   n = 1, j even: cos(j g + k ell), prefactor delta omega^2 / 4
#   n = 1, j odd:  sin(j g + k ell), prefactor 3 rho^2 tau omega / 448
#   n = 2:         cos(2 j g + 2 k ell), prefactor 9 rho / 62842304
# ---------------------------------------------------------------------------
_ONE = F(1)
HAMILTONIAN_TERMS = {
    (1, 0, -2): ((_ONE, 0, 1, 1, 1),),
    (1, 0, 0): ((_ONE, 0, -1, 2, 0), (_ONE, 0, -1, 0, 2)),
    (1, 0, 2): ((_ONE, 0, 1, 1, 1),),
    (1, 2, -2): ((_ONE, 0, 1, 2, 0),),
    (1, 2, 0): ((_ONE, 0, -2, 1, 1),),
    (1, 2, 2): ((_ONE, 0, 1, 0, 2),),
    (1, 1, -3): ((_ONE, -10, 7, 2, 1),),
    (1, 1, -1): ((_ONE, -20, 86, 1, 2), (_ONE, 6, 3, 3, 0)),
    (1, 1, 1): ((_ONE, -20, 86, 2, 1), (_ONE, 6, 3, 0, 3)),
    (1, 1, 3): ((_ONE, -10, 7, 1, 2),),
    (1, 3, -3): ((_ONE, -2, 11, 3, 0),),
    (1, 3, -1): ((_ONE, 10, -43, 2, 1),),
    (1, 3, 1): ((_ONE, 10, -43, 1, 2),),
    (1, 3, 3): ((_ONE, -2, 11, 0, 3),),
    (2, 0, 2): ((F(9, 4), 454826, -29767905, 2, 2),),
    (2, 0, -2): ((F(9, 4), 454826, -29767905, 2, 2),),
    (2, 0, 1): ((F(3, 2), 4601090, -7248069, 3, 1), (F(3, 2), 4601090, -7248069, 1, 3)),
    (2, 0, -1): ((F(3, 2), 4601090, -7248069, 3, 1), (F(3, 2), 4601090, -7248069, 1, 3)),
    (2, 0, 0): ((F(3, 4), -4733570, 54449757, 4, 0), (F(3, 4), -4733570, 54449757, 0, 4),
                (F(-27), -1473422, 7866699, 2, 2)),
    (2, 1, 2): ((_ONE, 4343546, 13096395, 1, 3),),
    (2, 1, -2): ((_ONE, 4343546, 13096395, 3, 1),),
    (2, 1, 1): ((F(3), -12398698, 56290797, 2, 2), (F(-1), -8226998, 45973827, 0, 4)),
    (2, 1, -1): ((F(3), -12398698, 56290797, 2, 2), (F(-1), -8226998, 45973827, 4, 0)),
    (2, 1, 0): ((F(-9), 1640482, -5859465, 3, 1), (F(-9), 1640482, -5859465, 1, 3)),
    (2, 2, 2): ((F(1, 4), -9394466, 35821341, 0, 4),),
    (2, 2, -2): ((F(1, 4), -9394466, 35821341, 4, 0),),
    (2, 2, 1): ((_ONE, -622142, 3324843, 1, 3),),
    (2, 2, -1): ((_ONE, -622142, 3324843, 3, 1),),
    (2, 2, 0): ((F(27, 2), 1658222, -6951883, 2, 2),),
}

# ---------------------------------------------------------------------------
# Short-period coefficients, keyed by row (i, j). Each column is a tuple of
# (q, c, pd, ps) = q * c * d**pd * s**ps where c names one of the c constants
# (None for 1). The "L" column is stored divided by 4 s d omega.
# ---------------------------------------------------------------------------
C_CONSTANTS = {
    "c13": (F(7, 3), F(-256, 3)),
    "c31": (F(43), F(-184)),
    "c33": (F(11), F(-32)),
}
C_CONSTANTS["c0"] = tuple(p - 4 * q for p, q in zip(C_CONSTANTS["c31"], C_CONSTANTS["c33"]))
C_CONSTANTS["c2"] = tuple(5 * p - 36 * q for p, q in zip(C_CONSTANTS["c31"], C_CONSTANTS["c33"]))

CORRECTION_TERMS = {
    (1, -3): {"L": ((-3, "c13", 2, 1),),
              "ell": ((1, "c13", 3, 0), (2, "c13", 1, 2)),
              "g": ((1, "c13", 3, 0), (-2, "c13", 1, 2))},
    (1, -1): {"L": ((3, "c0", 3, 0), (-2, "c31", 1, 2)),
              "ell": ((2, "c31", 0, 3), (-1, "c2", 2, 1)),
              # 8 c31 d^2 s - ell_{1,-1}
              "g": ((8, "c31", 2, 1), (-2, "c31", 0, 3), (1, "c2", 2, 1))},
    (1, 1): {"L": ((3, "c0", 0, 3), (-2, "c31", 2, 1)),
             "ell": ((1, "c2", 1, 2), (-2, "c31", 3, 0)),
             # 8 c31 d s^2 + ell_{1,1}
             "g": ((8, "c31", 1, 2), (1, "c2", 1, 2), (-2, "c31", 3, 0))},
    (1, 3): {"L": ((-3, "c13", 1, 2),),
             "ell": ((-2, "c13", 2, 1), (-1, "c13", 0, 3)),
             "g": ((1, "c13", 0, 3), (-2, "c13", 2, 1))},
    (2, -1): {"L": ((-1, None, 2, 0),), "ell": ((1, None, 1, 1),), "g": ((-1, None, 1, 1),)},
    (2, 0): {"L": ((-2, None, 1, 1),),
             "ell": ((1, None, 2, 0), (1, None, 0, 2)),
             "g": ((1, None, 2, 0), (-1, None, 0, 2))},
    (2, 1): {"L": ((-1, None, 0, 2),), "ell": ((1, None, 1, 1),), "g": ((1, None, 1, 1),)},
    (3, -3): {"L": ((-1, "c33", 3, 0),), "ell": ((1, "c33", 2, 1),), "g": ((-1, "c33", 2, 1),)},
    (3, -1): {"L": ((1, "c31", 2, 1),),
              "ell": ((-1, "c31", 3, 0), (-2, "c31", 1, 2)),
              "g": ((2, "c31", 1, 2), (-1, "c31", 3, 0))},
    (3, 1): {"L": ((1, "c31", 1, 2),),
             "ell": ((2, "c31", 2, 1), (1, "c31", 0, 3)),
             "g": ((2, "c31", 2, 1), (-1, "c31", 0, 3))},
    (3, 3): {"L": ((-1, "c33", 0, 3),), "ell": ((-1, "c33", 1, 2),), "g": ((-1, "c33", 1, 2),)},
}


def _c_value(name):
    if name is None:
        return 1.0
    a, b = C_CONSTANTS[name]
    return float(a) * build_constants().omega2 + float(b)


def _eval_q(terms, d, s):
    w2 = build_constants().omega2
    return sum(float(q) * (a * w2 + b) * d ** pd * s ** ps for q, a, b, pd, ps in terms)


def _eval_row(terms, d, s):
    return sum(float(q) * _c_value(c) * d ** pd * s ** ps for q, c, pd, ps in terms)


def state_functions(L, G):
    """``s = sqrt((L+G)/(2 omega))``, ``d = sqrt((L-G)/(2 omega))``.

    Raises :class:`DomainError` unless ``|G| <= L`` (up to rounding).
    """
    omega = build_constants().omega
    L = np.asarray(L, dtype=float)
    G = np.asarray(G, dtype=float)
    slack = 1e-12 * np.maximum(np.abs(L), 1e-300)
    if np.any(np.abs(G) > L + slack):
        raise DomainError("Lissajous momenta require |G| <= L")
    s = np.sqrt(np.clip((L + G) / (2 * omega), 0.0, None))
    d = np.sqrt(np.clip((L - G) / (2 * omega), 0.0, None))
    return s, d


def lissajous_to_cm(state):
    """Lissajous ``(ell, g, L, G)`` -> centre-manifold ``(y2, z2, Y2, Z2)``."""
    omega = build_constants().omega
    ell, g, L, G = state
    s, d = state_functions(L, G)
    plus, minus = np.add(g, ell), np.subtract(g, ell)
    y = s * np.cos(plus) - d * np.cos(minus)
    z = s * np.sin(plus) - d * np.sin(minus)
    Y = -omega * (s * np.sin(plus) + d * np.sin(minus))
    Z = omega * (s * np.cos(plus) + d * np.cos(minus))
    return np.stack(np.broadcast_arrays(y, z, Y, Z), axis=-1)


def cm_to_lissajous(cm):
    """Inverse Lissajous map.

    When the ellipse is a circle (``|G| = L``) the orientation is undefined;
    ``g`` is then set to 0 and the whole phase goes into ``ell``. The pair
    ``(g, ell)`` is otherwise defined modulo the simultaneous shift by pi.
    """
    omega = build_constants().omega
    y, z, Y, Z = np.moveaxis(np.asarray(cm, dtype=float), -1, 0)
    L = (0.5 * (Y * Y + Z * Z) + 0.5 * omega ** 2 * (y * y + z * z)) / omega
    if np.any(L == 0.0):
        raise DegenerateStateError("Lissajous chart undefined at the origin (L = 0)")
    G = y * Z - z * Y
    pos = y + 1j * z
    mom = -1j * (Y + 1j * Z) / omega
    splus = 0.5 * (pos + mom)    # s exp(i(g + ell))
    dminus = 0.5 * (mom - pos)   # d exp(i(g - ell))
    alpha, beta = np.angle(splus), np.angle(dminus)
    scale = np.abs(splus) + np.abs(dminus)
    d_zero = np.abs(dminus) <= 1e-13 * scale
    s_zero = np.abs(splus) <= 1e-13 * scale
    g = np.where(d_zero | s_zero, 0.0, 0.5 * (alpha + beta))
    ell = np.where(d_zero, alpha, np.where(s_zero, -beta, 0.5 * (alpha - beta)))
    G = np.clip(G, -L, L)
    return LissajousState(ell, g, L, G)


def lissajous_terms(state):
    """``(A0, A1, A2)`` with the Hamiltonian ``A0 + A1 + A2/2``."""
    c = build_constants()
    ell, g, L, G = state
    s, d = state_functions(L, G)
    a0 = c.omega * np.asarray(L, dtype=float)
    even = odd = second = 0.0
    for (n, j, k), terms in HAMILTONIAN_TERMS.items():
        q = _eval_q(terms, d, s)
        if n == 1 and j % 2 == 0:
            even = even + q * np.cos(j * g + k * ell)
        elif n == 1:
            odd = odd + q * np.sin(j * g + k * ell)
        else:
            second = second + q * np.cos(2 * j * g + 2 * k * ell)
    a1 = 0.25 * c.delta * c.omega2 * even + 3.0 / 448 * c.rho ** 2 * c.tau * c.omega * odd
    a2 = 9.0 * c.rho / 62842304 * second
    return a0, a1, a2


def lissajous_hamiltonian(state):
    a0, a1, a2 = lissajous_terms(state)
    return a0 + a1 + 0.5 * a2


def normalized_terms(mean):
    """``(B0, B1, B2)`` of the averaged Hamiltonian (no ``ell`` dependence)."""
    c = build_constants()
    _, g, L, G = mean
    s, d = state_functions(L, G)
    L = np.asarray(L, dtype=float)
    G = np.asarray(G, dtype=float)
    b0 = c.omega * L
    b1 = -0.25 * c.delta * c.omega * (L + 2 * c.omega * d * s * np.cos(2 * g))
    b2 = 2.0 * (0.25 * c.delta * b1 - c.k1 * L ** 2
                + c.k2 * L * c.omega * s * d * np.cos(2 * g)
                - c.k3 * c.omega2 * s ** 2 * d ** 2 * np.cos(4 * g)
                + 0.25 * c.k4 * G ** 2)
    return b0, b1, b2


def normalized_hamiltonian(mean):
    b0, b1, b2 = normalized_terms(mean)
    return b0 + b1 + 0.5 * b2


def _periodic_part(mean):
    """First-order short-period terms ``(d_ell, d_g, d_L, d_G)`` at ``mean``."""
    c = build_constants()
    ell, g, L, G = mean
    s, d = state_functions(L, G)
    four_sd = 4.0 * s * d
    delta_pref = 0.25 * c.delta
    odd_pref = c.rho ** 2 * c.tau * c.omega / 4032
    d_ell = d_g = d_L = d_G = 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        for (i, j), row in CORRECTION_TERMS.items():
            L_entry = c.omega * _eval_row(row["L"], d, s)   # L_{i,j} / (4 s d)
            ell_entry = _eval_row(row["ell"], d, s) / four_sd
            g_entry = _eval_row(row["g"], d, s) / four_sd
            if i == 2:
                m, n = 2 * j, 2
                arg = m * g + n * np.asarray(ell)
                d_L = d_L + delta_pref * L_entry * np.cos(arg)
                d_G = d_G + delta_pref * (m / n) * L_entry * np.cos(arg)
                d_ell = d_ell + delta_pref * ell_entry * np.cos(arg - np.pi / 2)
                d_g = d_g + delta_pref * g_entry * np.cos(arg - np.pi / 2)
            else:
                m, n = i, j
                arg = m * g + n * np.asarray(ell)
                d_L = d_L + odd_pref * L_entry * np.sin(arg)
                d_G = d_G + odd_pref * (m / n) * L_entry * np.sin(arg)
                d_ell = d_ell + odd_pref * ell_entry * np.sin(arg + np.pi / 2)
                d_g = d_g + odd_pref * g_entry * np.sin(arg + np.pi / 2)
    return d_ell, d_g, d_L, d_G


def _near_circular(L, G):
    s, d = state_functions(L, G)
    return np.asarray(s * d < 1e-9 * np.abs(np.asarray(L, dtype=float)))


def short_period_corrections(state, inverse=False):
    """Mean -> osculating Lissajous elements (``inverse=True`` goes back).

    Both directions are first order: the inverse subtracts the corrections
    evaluated at the osculating state. Near-circular states (``s d`` below
    ``1e-9 L``) are returned unchanged with a warning, since the angle
    corrections carry a ``1/(s d)`` factor there.
    """
    ell, g, L, G = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in state))
    circ = _near_circular(L, G)
    if np.any(circ):
        warnings.warn("near-circular Lissajous state: short-period corrections skipped",
                      RuntimeWarning, stacklevel=2)
    deltas = _periodic_part(LissajousState(ell, g, L, G))
    sign = -1.0 if inverse else 1.0
    out = []
    for value, corr in zip((ell, g, L, G), deltas):
        corr = np.where(circ, 0.0, corr)
        out.append(value + sign * corr)
    return LissajousState(*out)


def table_audit():
    """Every stored coefficient in exact and evaluated form (for manual audit)."""
    c = build_constants()
    t1 = []
    for (n, j, k), terms in HAMILTONIAN_TERMS.items():
        t1.append({
            "label": [n, j, k],
            "terms": [{"rational": str(q), "omega2": a, "const": b, "d_power": pd, "s_power": ps,
                       "value": float(q) * (a * c.omega2 + b)} for q, a, b, pd, ps in terms],
        })
    t2 = []
    for (i, j), row in CORRECTION_TERMS.items():
        entry = {"row": [i, j]}
        for col in ("L", "ell", "g"):
            entry[col] = [{"factor": q, "constant": name, "d_power": pd, "s_power": ps,
                           "value": q * _c_value(name)} for q, name, pd, ps in row[col]]
        t2.append(entry)
    consts = {name: {"omega2": str(a), "const": str(b), "value": _c_value(name)}
              for name, (a, b) in C_CONSTANTS.items()}
    return {"hamiltonian_terms": t1, "correction_terms": t2, "c_constants": consts,
            "correction_singular_angle_rows": singular_angle_rows()}


def singular_angle_rows():
    """Rows whose angle corrections do not cancel the ``1/(4 s d)`` factor.

    Momentum rows always cancel (the L column is stored divided by
    ``4 s d omega``). Angle entries cancel only if every term carries both
    a ``d`` and an ``s`` factor; anything else is reported.
    """
    rows = []
    for key, row in CORRECTION_TERMS.items():
        for col in ("ell", "g"):
            if any(pd == 0 or ps == 0 for _, _, pd, ps in row[col]):
                rows.append([key[0], key[1], col])
    return rows
