"""Legendre polynomials, Gauss quadrature and the compact temporal basis.

The temporal basis on the reference slab [-1, 1] is

    phi_0 = 1,  phi_1 = (1 + xi) / 2,  phi_k = L_k - L_{k-2}  (k >= 2),

so only phi_0 and phi_1 are nonzero at the slab end points.  The slab system
couples the modes k = 1..N through

    A_xi[i, j] = (phi_i', phi_j'),   C_xi[i, j] = (phi_i', phi_j).
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_TEMPORAL_DEGREE = 8


def legendre_eval(k, x):
    """Return ``(L_k(x), L_k'(x))`` by forward three-term recurrence.

    ``x`` may be a scalar or an array and may lie outside [-1, 1].
    """
    if k < 0:
        raise ValueError("Legendre degree must be nonnegative")
    vals, ders = legendre_table(k, x)
    return vals[k], ders[k]


def legendre_table(kmax, x):
    """Values and derivatives of L_0..L_kmax at ``x``, shape ``(kmax+1, *x.shape)``."""
    x = np.asarray(x, dtype=float)
    vals = np.empty((kmax + 1,) + x.shape)
    ders = np.empty_like(vals)
    vals[0] = 1.0
    ders[0] = 0.0
    if kmax >= 1:
        vals[1] = x
        ders[1] = 1.0
    for k in range(1, kmax):
        vals[k + 1] = ((2 * k + 1) * x * vals[k] - k * vals[k - 1]) / (k + 1)
        ders[k + 1] = ders[k - 1] + (2 * k + 1) * vals[k]
    return vals, ders


@dataclass(frozen=True)
class QuadratureRule:
    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values, axis=-1):
        return np.tensordot(np.asarray(values), self.weights, axes=([axis], [0]))

    def mapped(self, a, b):
        """Nodes and weights transplanted to the interval [a, b]."""
        half = 0.5 * (b - a)
        return a + half * (self.nodes + 1.0), half * self.weights


@lru_cache(maxsize=None)
def gauss_rule(n, tol=1e-15, maxiter=100):
    """Gauss-Legendre rule with ``n`` points.

    Roots of L_n are found by Newton iteration from Chebyshev guesses; the
    negative half is mirrored from the positive one so the rule is exactly
    symmetric.
    """
    if n < 1:
        raise ValueError("quadrature order must be >= 1")
    m = (n + 1) // 2
    # Chebyshev-Gauss points, largest first
    x = np.cos(np.pi * (np.arange(m) + 0.75) / (n + 0.5))
    for _ in range(maxiter):
        v, d = legendre_eval(n, x)
        dx = v / d
        x = x - dx
        if np.max(np.abs(dx)) <= tol:
            break
    _, d = legendre_eval(n, x)
    w = 2.0 / ((1.0 - x * x) * d * d)
    if n % 2:
        x[-1] = 0.0
        nodes = np.concatenate([-x, x[-2::-1]])
        weights = np.concatenate([w, w[-2::-1]])
    else:
        nodes = np.concatenate([-x, x[::-1]])
        weights = np.concatenate([w, w[::-1]])
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return QuadratureRule(n, nodes, weights)


def phi_table(kmax, xi):
    """Values and derivatives of phi_0..phi_kmax at ``xi``."""
    xi = np.asarray(xi, dtype=float)
    lv, ld = legendre_table(max(kmax, 1), xi)
    vals = np.empty((kmax + 1,) + xi.shape)
    ders = np.empty_like(vals)
    vals[0] = 1.0
    ders[0] = 0.0
    if kmax >= 1:
        vals[1] = 0.5 * (1.0 + xi)
        ders[1] = 0.5
    for k in range(2, kmax + 1):
        vals[k] = lv[k] - lv[k - 2]
        ders[k] = ld[k] - ld[k - 2]
    return vals, ders


def phi_eval(k, xi):
    """Return ``(phi_k(xi), phi_k'(xi))``."""
    if k < 0:
        raise ValueError("basis index must be nonnegative")
    vals, ders = phi_table(k, xi)
    return vals[k], ders[k]


@dataclass(frozen=True)
class TemporalMatrices:
    """Slab matrices over the modes k = 1..N (the k = 0 mode is pinned)."""

    N: int
    A_xi: np.ndarray
    C_xi: np.ndarray
    a_coeffs: np.ndarray


@lru_cache(maxsize=None)
def temporal_matrices(N):
    if not 1 <= N <= MAX_TEMPORAL_DEGREE:
        raise ValueError(f"temporal degree N must be in 1..{MAX_TEMPORAL_DEGREE}, got {N}")
    q = gauss_rule(N + 2)
    vals, ders = phi_table(N, q.nodes)
    dphi = ders[1:] * q.weights
    A = dphi @ ders[1:].T
    C = dphi @ vals[1:].T
    A_diag = np.diag(np.diag(A))
    # structural zeros of C_xi: only (0, 0) and the first off-diagonals survive
    pattern = np.zeros((N, N), dtype=bool)
    pattern[0, 0] = True
    idx = np.arange(N - 1)
    pattern[idx, idx + 1] = pattern[idx + 1, idx] = True
    C = np.where(pattern, C, 0.0)
    a = np.empty(N)
    a[0] = C[0, 0]
    for k in range(1, N):
        a[k] = C[k - 1, k]
    for arr in (A_diag, C, a):
        arr.flags.writeable = False
    return TemporalMatrices(N, A_diag, C, a)


@dataclass(frozen=True)
class ExtensionConstants:
    c: np.ndarray
    C_N: float


def extension_constants(N):
    """Ratios c_k = int_1^3 L_k^2 / int_{-1}^1 L_k^2 for k = 0..N and their root-sum."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    c = np.empty(N + 1)
    for k in range(N + 1):
        x, w = gauss_rule(k + 1).mapped(1.0, 3.0)
        lk = legendre_eval(k, x)[0]
        c[k] = np.dot(w, lk * lk) * (2 * k + 1) / 2.0
    return ExtensionConstants(c, float(np.sqrt(c.sum())))
