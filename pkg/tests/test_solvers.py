import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eset.legendre import temporal_matrices
from eset.solvers import (
    DiagonalizedSlabSolver,
    SolverError,
    SparseSlabSolver,
    apply_slab_operator,
    diagonalize_temporal,
    make_slab_solver,
    slab_matrix,
    solve_slab_diagonalized,
    solve_slab_sparse,
)
from eset.spatial import make_space


def _rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def test_single_mode_eigenvalue_is_one():
    d = diagonalize_temporal(temporal_matrices(1))
    assert d.Lambda[0] == pytest.approx(1.0, abs=1e-15)


def test_eigenvalues_match_characteristic_polynomial():
    tm = temporal_matrices(3)
    # det(A - lam C) sampled at 4 points determines the cubic
    lam = np.array([0.0, 1.0, 2.0, -1.0])
    dets = [np.linalg.det(tm.A_xi - s * tm.C_xi) for s in lam]
    roots = np.roots(np.polyfit(lam, dets, 3))
    got = diagonalize_temporal(tm).Lambda
    np.testing.assert_allclose(np.sort_complex(got), np.sort_complex(roots), rtol=1e-10)
    assert np.sum(np.abs(got.imag) > 0) in (0, 2)


@pytest.mark.parametrize("N", range(1, 9))
def test_decomposition_contract(N):
    d = diagonalize_temporal(temporal_matrices(N))
    assert d.residual <= 1e-12
    assert np.max(np.abs(d.E @ d.E_inv - np.eye(N))) <= 1e-11
    for i, j in enumerate(d.partner):
        assert d.Lambda[j] == np.conj(d.Lambda[i])
        np.testing.assert_array_equal(d.E[:, j], np.conj(d.E[:, i]))
    assert np.all(d.Lambda.real > 0)


@pytest.mark.parametrize("cls", [SparseSlabSolver, DiagonalizedSlabSolver])
def test_zero_rhs_gives_zero(cls):
    s = make_space("dirichlet", 12)
    solver = cls(s, temporal_matrices(3), 0.01, 0.05, 0.0)
    assert not np.any(solver.solve(np.zeros((3, 12))))


@pytest.mark.parametrize("dim", [1, 2])
@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_solvers_agree_and_solve_the_system(dim, N):
    s = make_space("neumann" if dim == 2 else "dirichlet", 9 if dim == 2 else 20, dim=dim)
    tm = temporal_matrices(N)
    rhs = np.random.default_rng(N).standard_normal((N, s.size))
    sparse = SparseSlabSolver(s, tm, 0.02, 0.05, 1.0)
    diag = DiagonalizedSlabSolver(s, tm, 0.02, 0.05, 1.0)
    Hs, Hd = solve_slab_sparse(sparse, rhs), solve_slab_diagonalized(diag, rhs)
    assert _rel(Hd, Hs) <= (1e-10 if dim == 1 else 1e-9)
    assert diag.last_imag_residue <= 1e-10
    for H in (Hs, Hd):
        assert _rel(apply_slab_operator(s, tm, 0.02, 0.05, 1.0, H), rhs) <= 1e-11


def test_kronecker_matrix_matches_operator():
    s = make_space("dirichlet", 6)
    tm = temporal_matrices(2)
    H = np.random.default_rng(0).standard_normal((2, 6))
    K = slab_matrix(s, tm, 0.1, 0.3, 2.0)
    np.testing.assert_allclose(K @ H.reshape(-1), apply_slab_operator(s, tm, 0.1, 0.3, 2.0, H).reshape(-1),
                               atol=1e-13)


def test_single_mode_heat_step_closed_form():
    # N = 1, one Dirichlet mode: ((2/tau) B/2 + eps A/2) h = r is scalar
    s = make_space("dirichlet", 2)
    tm = temporal_matrices(1)
    tau, eps = 0.1, 0.5
    rhs = np.array([[1.0, 0.0]])
    H = SparseSlabSolver(s, tm, tau, eps, 0.0).solve(rhs)
    B, A = s.ops.B_x, s.ops.A_x
    # mode 1 decouples from mode 0 in both matrices (bandwidth 2)
    expected = 1.0 / (B[0, 0] / tau + 0.5 * eps * A[0, 0])
    assert H[0, 0] == pytest.approx(expected, rel=1e-14)
    assert H[0, 1] == 0.0


def test_factorization_reuse_is_bitwise():
    s = make_space("dirichlet", 16)
    rhs = np.random.default_rng(2).standard_normal((3, 16))
    for cls in (SparseSlabSolver, DiagonalizedSlabSolver):
        solver = cls(s, temporal_matrices(3), 0.01, 0.05, 0.0)
        assert solver.solve(rhs).tobytes() == solver.solve(rhs).tobytes()


def test_nonpositive_shift_rejected():
    s = make_space("dirichlet", 8)
    with pytest.raises(SolverError, match="nonpositive"):
        DiagonalizedSlabSolver(s, temporal_matrices(2), -0.01, 0.05, 0.0)


def test_unknown_method():
    with pytest.raises(ValueError, match="unknown slab solver"):
        make_slab_solver("cg", make_space("dirichlet", 4), temporal_matrices(1), 0.1, 0.1, 0.0)


@settings(max_examples=30, deadline=None)
@given(
    N=st.integers(1, 4),
    M=st.sampled_from([8, 16, 32]),
    kind=st.sampled_from(["dirichlet", "neumann"]),
    tau=st.floats(1e-4, 0.5),
    eps=st.floats(1e-3, 1.0),
    S=st.sampled_from([0.0, 1.0, 2.0]),
    seed=st.integers(0, 2**31 - 1),
)
def test_cross_validation_random_configs(N, M, kind, tau, eps, S, seed):
    s = make_space(kind, M)
    tm = temporal_matrices(N)
    rhs = np.random.default_rng(seed).standard_normal((N, M))
    a = SparseSlabSolver(s, tm, tau, eps, S).solve(rhs)
    b = DiagonalizedSlabSolver(s, tm, tau, eps, S).solve(rhs)
    assert _rel(b, a) <= 1e-9
