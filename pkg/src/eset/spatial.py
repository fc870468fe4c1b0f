"""Legendre-Galerkin spatial discretization on [-1, 1] and [-1, 1]^2.

Two boundary-adapted families are supported:

* ``dirichlet``: psi_k = L_k - L_{k+2}, vanishing at x = +-1;
* ``neumann``:   psi_k = L_k - k(k+1)/((k+2)(k+3)) L_{k+2}, with psi_k'(+-1) = 0.

Stiffness is diagonal for both families and the mass matrix is pentadiagonal
(only offsets 0 and +-2 are nonzero), so per-mode solves are banded.

Fields are stored as flat modal vectors; in 2D the x index is the slow one.
Nodal values live on the tensor Gauss grid of order M + 2 per direction.
"""
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .legendre import gauss_rule, legendre_table

KINDS = ("dirichlet", "neumann")


@dataclass(frozen=True)
class SpatialOperators:
    A_x: np.ndarray
    B_x: np.ndarray
    bandwidth_A: int
    bandwidth_B: int


def _bandwidth(mat):
    rows, cols = np.nonzero(mat)
    return int(np.max(np.abs(rows - cols))) if rows.size else 0


def _drop_off_band(mat, width, rtol=1e-11):
    """Zero entries outside ``|i - j| <= width`` after checking they are roundoff."""
    i, j = np.indices(mat.shape)
    off = np.abs(i - j) > width
    scale = np.max(np.abs(mat))
    leak = np.max(np.abs(mat[off])) if off.any() else 0.0
    if leak > rtol * scale:
        raise ArithmeticError(f"matrix leaks outside bandwidth {width}: {leak:.3e}")
    out = np.where(off, 0.0, mat)
    # parity zeros inside the band
    out[np.abs(out) <= rtol * scale] = 0.0
    return out


def _combination(kind, M):
    k = np.arange(M, dtype=float)
    if kind == "dirichlet":
        return -np.ones(M)
    return -k * (k + 1) / ((k + 2) * (k + 3))


class SpatialBasis1D:
    """Boundary-adapted Legendre basis with its Gauss grid."""

    def __init__(self, kind, M, quad_order=None):
        if kind not in KINDS:
            raise ValueError(f"unknown spatial basis kind {kind!r}; expected one of {KINDS}")
        if M < 2:
            raise ValueError("M must be >= 2")
        self.kind = kind
        self.M = M
        self.quad = gauss_rule(quad_order or M + 2)
        self.beta = _combination(kind, M)
        self.vals, self.ders = self.evaluate(self.quad.nodes)
        self.vals.flags.writeable = False
        self.ders.flags.writeable = False

    def evaluate(self, x):
        """Values and derivatives of psi_0..psi_{M-1}, shape ``(len(x), M)``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        lv, ld = legendre_table(self.M + 1, x)
        vals = lv[: self.M] + self.beta[:, None] * lv[2 : self.M + 2]
        ders = ld[: self.M] + self.beta[:, None] * ld[2 : self.M + 2]
        return vals.T, ders.T


def build_basis(kind, M, quad_order=None):
    """Return ``(basis, operators)`` with quadrature-assembled stiffness and mass."""
    basis = SpatialBasis1D(kind, M, quad_order)
    w = basis.quad.weights
    A = (basis.ders.T * w) @ basis.ders
    B = (basis.vals.T * w) @ basis.vals
    A = _drop_off_band(0.5 * (A + A.T), 0)
    B = _drop_off_band(0.5 * (B + B.T), 2)
    for m in (A, B):
        m.flags.writeable = False
    return basis, SpatialOperators(A, B, _bandwidth(A), _bandwidth(B))


class Space:
    """Common interface of the 1D and tensor-product 2D discretizations."""

    dim: int
    shape: tuple
    stiffness: sp.csr_matrix
    mass: sp.csr_matrix

    @property
    def size(self):
        return int(np.prod(self.shape))

    @property
    def measure(self):
        return 2.0 ** self.dim

    def check(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape[-1] != self.size:
            raise ValueError(f"modal field has {coeffs.shape[-1]} coefficients, expected {self.size}")
        return coeffs

    def project(self, u0):
        """Interpolation-projection of a point-evaluable function onto the space."""
        values = np.asarray(u0(*self.points()), dtype=float)
        values = np.broadcast_to(values, self.grid_shape)
        if not np.all(np.isfinite(values)):
            raise ValueError("initial data is not finite at every Gauss point")
        return self.to_modal(values.reshape(-1))

    def random_field(self, seed, low=0.0, high=1.0):
        """Uniform random nodal values projected onto the space (reproducible by seed)."""
        rng = np.random.default_rng(seed)
        return self.to_modal(rng.uniform(low, high, size=self.grid_size))

    @property
    def grid_size(self):
        return int(np.prod(self.grid_shape))

    def integrate(self, values):
        """Quadrature integral over the domain of nodal values (batched over leading axes)."""
        return np.asarray(values) @ self.weights

    def mass_of(self, coeffs):
        return self.integrate(self.to_nodal(coeffs))

    def energy_gradient(self, coeffs):
        """Integral of |grad u|^2 through the stiffness quadratic form."""
        c = self.check(coeffs)
        return float(c @ (self.stiffness @ c))


class Space1D(Space):
    dim = 1

    def __init__(self, kind, M, quad_order=None):
        self.basis, self.ops = build_basis(kind, M, quad_order)
        self.kind = kind
        self.shape = (M,)
        self.grid_shape = (self.basis.quad.order,)
        self.weights = np.asarray(self.basis.quad.weights)
        self.stiffness = sp.csr_matrix(self.ops.A_x)
        self.mass = sp.csr_matrix(self.ops.B_x)
        # L2 projector B^{-1} Psi^T W from nodal values to coefficients
        self._projector = np.linalg.solve(self.ops.B_x, self.basis.vals.T * self.weights)

    def points(self):
        return (np.asarray(self.basis.quad.nodes),)

    def to_nodal(self, coeffs):
        return self.check(coeffs) @ self.basis.vals.T

    def to_modal(self, values):
        values = np.asarray(values, dtype=float)
        if values.shape[-1] != self.grid_size:
            raise ValueError(f"expected {self.grid_size} nodal values, got {values.shape[-1]}")
        return values @ self._projector.T

    def load(self, values):
        """Inner products (v, psi_j) of nodal data with every basis function."""
        return (np.asarray(values) * self.weights) @ self.basis.vals

    def gradient(self, coeffs):
        return (self.check(coeffs) @ self.basis.ders.T,)

    def evaluate(self, coeffs, x):
        vals, _ = self.basis.evaluate(x)
        return self.check(coeffs) @ vals.T


class Space2D(Space):
    dim = 2

    def __init__(self, sx, sy):
        self.sx, self.sy = sx, sy
        self.kind = sx.kind if sx.kind == sy.kind else (sx.kind, sy.kind)
        self.shape = (sx.size, sy.size)
        self.grid_shape = (sx.grid_size, sy.grid_size)
        self.weights = np.outer(sx.weights, sy.weights).reshape(-1)
        Ax, Bx = sx.stiffness, sx.mass
        Ay, By = sy.stiffness, sy.mass
        self.stiffness = (sp.kron(Ax, By) + sp.kron(Bx, Ay)).tocsr()
        self.mass = sp.kron(Bx, By).tocsr()

    def _split(self, arr, shape):
        arr = np.asarray(arr, dtype=float)
        return arr.reshape(arr.shape[:-1] + shape)

    def _flat(self, arr):
        return arr.reshape(arr.shape[:-2] + (-1,))

    def points(self):
        X, Y = np.meshgrid(self.sx.points()[0], self.sy.points()[0], indexing="ij")
        return X, Y

    def to_nodal(self, coeffs):
        C = self._split(self.check(coeffs), self.shape)
        return self._flat(self.sx.basis.vals @ C @ self.sy.basis.vals.T)

    def to_modal(self, values):
        values = np.asarray(values, dtype=float)
        if values.shape[-1] != self.grid_size:
            raise ValueError(f"expected {self.grid_size} nodal values, got {values.shape[-1]}")
        V = self._split(values, self.grid_shape)
        return self._flat(self.sx._projector @ V @ self.sy._projector.T)

    def load(self, values):
        V = self._split(values, self.grid_shape) * self.weights.reshape(self.grid_shape)
        return self._flat(self.sx.basis.vals.T @ V @ self.sy.basis.vals)

    def gradient(self, coeffs):
        C = self._split(self.check(coeffs), self.shape)
        bx, by = self.sx.basis, self.sy.basis
        return (
            self._flat(bx.ders @ C @ by.vals.T),
            self._flat(bx.vals @ C @ by.ders.T),
        )

    def evaluate(self, coeffs, x, y):
        vx, _ = self.sx.basis.evaluate(x)
        vy, _ = self.sy.basis.evaluate(y)
        C = self._split(self.check(coeffs), self.shape)
        return vx @ C @ vy.T


def tensorize_2d(sx, sy):
    return Space2D(sx, sy)


def make_space(kind, M, dim=1, quad_order=None):
    if dim == 1:
        return Space1D(kind, M, quad_order)
    if dim == 2:
        return Space2D(Space1D(kind, M, quad_order), Space1D(kind, M, quad_order))
    raise ValueError(f"dimension must be 1 or 2, got {dim}")


def project_initial(u0, space):
    return space.project(u0)
