"""Solvers for the slab system

    (2/tau) A_xi H B + eps C_xi H A + (S/eps) C_xi H B = RHS,

where H is the (N, size) block of unknown temporal modes 1..N, and A, B are
the spatial stiffness and mass matrices.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .spatial import Space2D

MAX_C_CONDITION = 1e8


class SolverError(ArithmeticError):
    pass


@dataclass(frozen=True)
class GeneralizedEigenDecomp:
    """A_xi E = C_xi E diag(Lambda), with complex eigenpairs stored adjacently.

    ``partner[i]`` is the index of the conjugate of eigenpair i (itself when real).
    """

    Lambda: np.ndarray
    E: np.ndarray
    E_inv: np.ndarray
    residual: float
    partner: np.ndarray
    C_condition: float


def diagonalize_temporal(tm, imag_tol=1e-12):
    A, C = tm.A_xi, tm.C_xi
    cond = np.linalg.cond(C)
    if not cond < MAX_C_CONDITION:
        raise SolverError(f"C_xi is ill-conditioned for N={tm.N}: cond={cond:.3e}")
    lam, E = np.linalg.eig(np.linalg.solve(C, A))
    scale = np.max(np.abs(lam))
    order, seen = [], set()
    for i in np.argsort(-lam.imag, kind="stable"):
        if i in seen:
            continue
        seen.add(i)
        if abs(lam[i].imag) <= imag_tol * scale:
            order.append(i)
            continue
        # match with the eigenvalue closest to the conjugate
        cands = [j for j in range(len(lam)) if j not in seen]
        j = min(cands, key=lambda j: abs(lam[j] - np.conj(lam[i])))
        seen.add(j)
        order.extend([i, j])
    lam_s = lam[order].astype(complex)
    E_s = E[:, order].astype(complex)
    partner = np.arange(len(lam_s))
    k = 0
    while k < len(lam_s):
        if abs(lam_s[k].imag) <= imag_tol * scale:
            lam_s[k] = lam_s[k].real
            v = E_s[:, k]
            # eigenvector of a real eigenvalue: rotate to a real representative
            v = v * np.exp(-1j * np.angle(v[np.argmax(np.abs(v))]))
            E_s[:, k] = v.real
            k += 1
        else:
            lam_s[k + 1] = np.conj(lam_s[k])
            E_s[:, k + 1] = np.conj(E_s[:, k])
            partner[k], partner[k + 1] = k + 1, k
            k += 2
    E_inv = np.linalg.inv(E_s)
    res = np.linalg.norm(A @ E_s - C @ E_s @ np.diag(lam_s)) / np.linalg.norm(A)
    return GeneralizedEigenDecomp(lam_s, E_s, E_inv, float(res), partner, float(cond))


def slab_matrix(space, tm, tau, eps, S):
    """Sparse Kronecker form of the slab operator acting on row-major vec(H)."""
    A_xi = sp.csr_matrix(tm.A_xi)
    C_xi = sp.csr_matrix(tm.C_xi)
    return (
        (2.0 / tau) * sp.kron(A_xi, space.mass)
        + eps * sp.kron(C_xi, space.stiffness)
        + (S / eps) * sp.kron(C_xi, space.mass)
    ).tocsc()


def apply_slab_operator(space, tm, tau, eps, S, H):
    HB = (space.mass @ H.T).T
    HA = (space.stiffness @ H.T).T
    return (2.0 / tau) * tm.A_xi @ HB + eps * tm.C_xi @ HA + (S / eps) * tm.C_xi @ HB


class SparseSlabSolver:
    """Direct sparse LU of the full Kronecker system, factored once."""

    method = "sparse"

    def __init__(self, space, tm, tau, eps, S):
        self.space, self.tm = space, tm
        self.tau, self.eps, self.S = tau, eps, S
        self.key = (tau, eps, S, tm.N, space.shape)
        try:
            self._lu = spla.splu(slab_matrix(space, tm, tau, eps, S))
        except RuntimeError as exc:
            raise SolverError(f"singular slab factorization: {exc}") from exc

    def solve(self, rhs):
        rhs = np.asarray(rhs, dtype=float)
        return self._lu.solve(rhs.reshape(-1)).reshape(rhs.shape)


class DiagonalizedSlabSolver:
    """Temporal diagonalization followed by N decoupled complex spatial solves.

    Each temporal mode i needs ``(sigma_i B + eps A) v_i = g_i`` with shift
    sigma_i = 2 lambda_i / tau + S / eps.  In 2D the x direction is diagonalized
    through the symmetric-definite pencil (A_x, B_x), leaving banded solves in y.
    Only one member of each conjugate pair is solved.
    """

    method = "diagonalized"

    def __init__(self, space, tm, tau, eps, S):
        self.space, self.tm = space, tm
        self.tau, self.eps, self.S = tau, eps, S
        self.key = (tau, eps, S, tm.N, space.shape)
        self.decomp = diagonalize_temporal(tm)
        self.shifts = 2.0 * self.decomp.Lambda / tau + S / eps
        bad = self.shifts.real <= 0
        if bad.any():
            raise SolverError(f"nonpositive real shift for lambda={self.decomp.Lambda[bad]}")
        self.modes = [i for i in range(tm.N) if self.decomp.partner[i] >= i]
        self._C_lu = sla.lu_factor(tm.C_xi)
        if isinstance(space, Space2D):
            self._setup_2d()
        else:
            self._setup_1d()
        self.last_imag_residue = 0.0

    def _factor(self, mat, shift_is_real):
        mat = mat.real if shift_is_real else mat
        return spla.splu(sp.csc_matrix(mat))

    def _setup_1d(self):
        A, B = self.space.stiffness, self.space.mass
        self._lu = {}
        for i in self.modes:
            s = self.shifts[i]
            self._lu[i] = self._factor(s * B + self.eps * A, s.imag == 0)

    def _setup_2d(self):
        sx, sy = self.space.sx, self.space.sy
        mu, Q = sla.eigh(sx.ops.A_x, sx.ops.B_x)
        self._mu, self._Q = mu, Q
        Ay, By = sy.stiffness, sy.mass
        self._lu = {}
        for i in self.modes:
            s = self.shifts[i]
            self._lu[i] = [
                self._factor((s + self.eps * m) * By + self.eps * Ay, s.imag == 0) for m in mu
            ]

    def _solve_mode(self, i, g):
        if isinstance(self.space, Space2D):
            Mx, My = self.space.shape
            G = self._Q.T @ g.reshape(Mx, My)
            if self.decomp.partner[i] == i:
                G = np.ascontiguousarray(G.real)
            W = np.empty(G.shape, dtype=G.dtype)
            for k, lu in enumerate(self._lu[i]):
                W[k] = lu.solve(G[k])
            return (self._Q @ W).reshape(-1)
        lu = self._lu[i]
        if self.decomp.partner[i] == i:
            return lu.solve(np.ascontiguousarray(g.real))
        return lu.solve(g)

    def solve(self, rhs):
        rhs = np.asarray(rhs, dtype=float)
        d = self.decomp
        G = d.E_inv @ sla.lu_solve(self._C_lu, rhs)
        V = np.empty(rhs.shape, dtype=complex)
        for i in self.modes:
            V[i] = self._solve_mode(i, G[i])
            j = d.partner[i]
            if j != i:
                V[j] = np.conj(V[i])
        H = d.E @ V
        norm = np.max(np.abs(H.real))
        self.last_imag_residue = float(np.max(np.abs(H.imag)) / norm) if norm > 0 else 0.0
        return H.real


SOLVERS = {"sparse": SparseSlabSolver, "diagonalized": DiagonalizedSlabSolver}


def make_slab_solver(method, space, tm, tau, eps, S):
    try:
        cls = SOLVERS[method]
    except KeyError:
        raise ValueError(f"unknown slab solver {method!r}; expected one of {tuple(SOLVERS)}") from None
    return cls(space, tm, tau, eps, S)


def solve_slab_sparse(solver, rhs):
    return solver.solve(rhs)


def solve_slab_diagonalized(solver, rhs):
    return solver.solve(rhs)
