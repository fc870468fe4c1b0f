import numpy as np
import pytest
import scipy.linalg as sla

from eset.baselines import (
    BlowUp,
    SemilinearSystem,
    etdrk4_coefficients,
    etdrk4_march,
    imex4_march,
    phi1,
)
from eset.diagnostics import fit_order
from eset.spatial import make_space


def _linear_mode(M=16, eps=0.5):
    space = make_space("dirichlet", M)
    lam, Q = sla.eigh(space.ops.A_x, space.ops.B_x)
    return space, SemilinearSystem(space, eps, reaction=False), lam[1], Q[:, 1]


def test_phi_functions_near_zero():
    assert phi1(0.0) == pytest.approx(1.0, abs=1e-14)
    e, e2, q, f1, f2, f3 = etdrk4_coefficients(np.array([0.0]))
    assert q[0] == pytest.approx(0.5, abs=1e-14)
    for f in (f1, f2, f3):
        assert f[0] == pytest.approx(1 / 6, abs=1e-14)


def test_phi_functions_match_direct_formulas_away_from_zero():
    z = np.array([-40.0, -3.0, -1.5, 2.0])
    e, e2, q, f1, f2, f3 = etdrk4_coefficients(z)
    ez = np.exp(z)
    np.testing.assert_allclose(phi1(z), (ez - 1) / z, rtol=1e-13)
    np.testing.assert_allclose(q, (np.exp(z / 2) - 1) / z, rtol=1e-13)
    np.testing.assert_allclose(f1, (-4 - z + ez * (4 - 3 * z + z * z)) / z**3, rtol=1e-12)
    np.testing.assert_allclose(f2, (2 + z + ez * (z - 2)) / z**3, rtol=1e-12)
    np.testing.assert_allclose(f3, (-4 - 3 * z - z * z + ez * (4 - z)) / z**3, rtol=1e-12)


def test_etdrk4_exact_on_linear_problem():
    space, system, lam, q = _linear_mode()
    tau = 0.05
    traj = etdrk4_march(system, q, tau, tau)
    np.testing.assert_allclose(traj.final, np.exp(-system.eps * lam * tau) * q, atol=1e-12)


def test_imex4_fourth_order_on_linear_problem():
    space, system, lam, q = _linear_mode()
    T = 0.4
    exact = lambda t: np.exp(-system.eps * lam * t) * q
    errs, taus = [], [0.04, 0.02, 0.01, 0.005]
    for tau in taus:
        start = [exact(k * tau) for k in (1, 2, 3)]
        final = imex4_march(system, q, tau, T, start=start).final
        errs.append(np.linalg.norm(final - exact(T)))
    assert fit_order(taus, errs) >= 3.9


def test_imex4_needs_start_states_without_reaction():
    _, system, _, q = _linear_mode()
    with pytest.raises(ValueError):
        imex4_march(system, q, 0.1, 0.4)


def test_linear_part_is_negative_semidefinite():
    space = make_space("neumann", 12)
    K = SemilinearSystem(space, 0.1).linear_matrix().toarray()
    np.testing.assert_allclose(K, K.T, atol=1e-14)
    assert np.linalg.eigvalsh(K).min() >= -1e-12


def test_eigenbasis_2d_diagonalizes():
    space = make_space("neumann", 6, dim=2)
    lam, Q = SemilinearSystem(space, 0.1).eigenbasis()
    B = space.mass.toarray()
    A = space.stiffness.toarray()
    np.testing.assert_allclose(Q.T @ B @ Q, np.eye(36), atol=1e-12)
    np.testing.assert_allclose(Q.T @ A @ Q, np.diag(lam), atol=1e-10)


def test_blow_up_reports_step():
    space = make_space("dirichlet", 64)
    system = SemilinearSystem(space, 0.01)
    with pytest.raises(BlowUp) as info:
        etdrk4_march(system, 40 * space.random_field(1, -1, 1), 0.1, 4.0)
    assert info.value.step >= 1


def test_step_count_must_divide():
    _, system, _, q = _linear_mode()
    with pytest.raises(ValueError):
        etdrk4_march(system, q, 0.03, 0.1)


@pytest.mark.parametrize("march", [imex4_march, etdrk4_march])
def test_trajectory_times(march):
    space = make_space("dirichlet", 32)
    system = SemilinearSystem(space, 0.1)
    traj = march(system, space.random_field(2, -0.5, 0.5), 0.01, 0.1)
    np.testing.assert_allclose(traj.times, np.arange(11) * 0.01, atol=1e-15)
    assert len(traj.states) == 11
