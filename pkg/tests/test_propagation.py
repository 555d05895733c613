import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hillhopf.errors import CollisionError, DomainError
from hillhopf.hill import hamiltonian, libration_points
from hillhopf.linear import build_constants
from hillhopf.propagation import (J6, flow, monodromy, propagate, propagate_stm,
                                  scaled_index, stability_indices, symplectic_inverse)

L1 = libration_points()[0]
c = build_constants()
S0 = L1 + np.array([0.01, 0.0, 0.02, 0.0, 0.015, 0.0])


def test_equilibrium_is_constant():
    # the saddle amplifies rounding by exp(lam t); keep t short
    np.testing.assert_allclose(flow(L1, 2.0), L1, atol=1e-13)


def test_energy_conservation():
    traj = propagate(S0, 100.0, tol=1e-12, t_eval=np.linspace(0, 100, 500))
    assert np.abs(traj.energy - hamiltonian(S0)).max() <= 1e-9


def test_time_reversal():
    tol = 1e-12
    forward = flow(S0, 5.0, tol)
    back = flow(forward, -5.0, tol)
    # forward-backward error grows with the saddle rate, exp(lam * 5) ~ 3e5
    assert np.linalg.norm(back - S0) <= 50 * tol * np.exp(c.lam * 5.0)


def test_dense_output_matches_samples():
    traj = propagate(S0, 3.0, t_eval=np.linspace(0, 3, 31))
    np.testing.assert_allclose(traj(traj.times), traj.states, atol=1e-12)


def test_stm_against_finite_differences():
    end, phi = propagate_stm(S0, 2.0)
    np.testing.assert_allclose(end, flow(S0, 2.0), atol=1e-11)
    h = 1e-6
    fd = np.column_stack([(flow(S0 + h * e, 2.0) - flow(S0 - h * e, 2.0)) / (2 * h)
                          for e in np.eye(6)])
    assert np.abs(phi - fd).max() <= 1e-5 * max(1.0, np.abs(fd).max())


def test_stm_is_symplectic():
    _, phi = propagate_stm(S0, 3.0)
    scale = max(1.0, np.abs(phi).max() ** 2)
    assert np.abs(phi.T @ J6 @ phi - J6).max() <= 1e-7 * scale
    assert np.linalg.det(phi) == pytest.approx(1.0, abs=1e-7)
    np.testing.assert_allclose(symplectic_inverse(phi) @ phi, np.eye(6), atol=1e-8)


def test_stm_linear_limit():
    # at the equilibrium the STM is the matrix exponential of the Jacobian
    from scipy.linalg import expm
    from hillhopf.hill import jacobian

    _, phi = propagate_stm(L1, 1.5)
    np.testing.assert_allclose(phi, expm(1.5 * jacobian(L1)), rtol=1e-9, atol=1e-10)


def test_linear_monodromy_indices():
    # equilibrium treated as a "periodic orbit" of period T: the indices are
    # 2 cosh(lam T) and 2 cos(w T), 2 cos(2 T)
    T = 2 * np.pi / c.omega
    _, M = propagate_stm(L1, T)
    s1, s2, _ = stability_indices(M, planar=True)
    assert s1 == pytest.approx(2 * np.cosh(c.lam * T), rel=1e-8)
    assert s2 == pytest.approx(2 * np.cos(2 * T), abs=1e-8)


def test_reciprocal_pairs_and_unit_pair():
    # small planar orbit from the library seed: the monodromy has a unit pair
    from hillhopf.orbits import planar_lyapunov_seed

    orbit = planar_lyapunov_seed()
    mono = monodromy(orbit.ic, orbit.period)
    ev = mono.eigenvalues
    assert np.sort(np.abs(ev - 1.0))[:2].max() < 1e-4
    for v in ev:
        assert np.min(np.abs(ev - 1.0 / v)) < 1e-6 * max(1.0, abs(1 / v))
    assert mono.det == pytest.approx(1.0, abs=1e-7)
    assert mono.symplectic_defect() < 1e-6 * np.abs(mono.M).max() ** 2
    # generic eigenvalue route agrees with the block route
    s1, s2, _ = stability_indices(mono.M)
    assert {round(s1, 5), round(s2, 5)} == {round(mono.s1, 5), round(mono.s2, 5)}


def test_symmetric_half_monodromy_matches_full():
    from hillhopf.orbits import R_XZ, planar_lyapunov_seed

    orbit = planar_lyapunov_seed()
    full = monodromy(orbit.ic, orbit.period)
    half = monodromy(orbit.ic, orbit.period, symmetric_half=R_XZ)
    np.testing.assert_allclose(half.M, full.M, rtol=1e-6, atol=1e-6 * np.abs(full.M).max())


def test_non_periodic_state_warns():
    with pytest.warns(RuntimeWarning):
        monodromy(S0, 1.0)


def test_collision():
    with pytest.raises(CollisionError):
        flow(np.array([0.05, 0.0, 0.0, 0.0, 0.0, 0.0]), 5.0)
    with pytest.raises(CollisionError):
        flow(np.array([1e-4, 0.0, 0.0, 0.0, 0.0, 0.0]), 1.0)


@pytest.mark.parametrize("tol", [1e-15, 1e-5])
def test_tolerance_range(tol):
    with pytest.raises(DomainError):
        propagate(S0, 1.0, tol=tol)


def test_scaled_index():
    assert scaled_index(2.0) == pytest.approx(2.0)
    assert scaled_index(-2.0) == pytest.approx(-2.0)
    assert scaled_index(0.0) == 0.0
    assert abs(scaled_index(2500.0)) < 20


def test_tolerance_convergence():
    ref = flow(S0, 4.0, 1e-13)
    errs = [np.linalg.norm(flow(S0, 4.0, tol) - ref) for tol in (1e-6, 1e-8, 1e-10)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-8


def test_csv_output():
    buf = io.StringIO()
    traj = propagate(S0, 1.0, t_eval=np.linspace(0, 1, 5))
    traj.to_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "t,px,py,pz,Px,Py,Pz,H"
    assert len(lines) == 6
    row = np.array(lines[3].split(","), dtype=float)
    np.testing.assert_array_equal(row[1:7], traj.states[2])


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(-0.05, 0.05), min_size=6, max_size=6), st.floats(0.1, 2.0))
def test_energy_property(offset, t):
    s0 = L1 + np.array(offset)
    end = flow(s0, t)
    assert hamiltonian(end) == pytest.approx(hamiltonian(s0), abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(-0.05, 0.05), min_size=6, max_size=6), st.floats(0.1, 2.0))
def test_mirror_property(offset, t):
    # z -> -z, Pz -> -Pz maps solutions to solutions
    s0 = L1 + np.array(offset)
    m = np.diag([1, 1, -1, 1, 1, -1.0])
    np.testing.assert_allclose(flow(m @ s0, t), m @ flow(s0, t), atol=1e-10)
