"""Fourth-order reference integrators on the same Legendre-Galerkin space.

Both act on the semi-discrete system

    B c' + (eps A + (S/eps) B) c = -(1/eps) (f(u) - S u, psi) + (g, psi).

IMEX4 works with the modal matrices directly (one sparse factorization);
ETDRK4 works in the generalized eigenbasis of (A, B), where the linear part
is diagonal.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from .marching import BLOWUP, Marcher, MarchError, SchemeSpec
from .potentials import PotentialSpec, fhat_eval
from .spatial import Space2D


class BlowUp(MarchError):
    pass


@dataclass
class Trajectory:
    times: list
    states: list

    @property
    def final(self):
        return self.states[-1]


class SemilinearSystem:
    """``reaction=False`` drops f, leaving the linear heat flow plus forcing."""

    def __init__(self, space, eps, potential=PotentialSpec(), forcing=None, reaction=True):
        self.space, self.eps, self.potential, self.forcing = space, eps, potential, forcing
        self.S = potential.S
        self.reaction = reaction

    def linear_matrix(self):
        """K with B c' = -K c + nonlinear(c, t)."""
        return (self.eps * self.space.stiffness + (self.S / self.eps) * self.space.mass).tocsc()

    def nonlinear(self, c, t):
        """Load vector of -(f(u) - S u)/eps + g."""
        space = self.space
        if self.reaction:
            with np.errstate(over="ignore", invalid="ignore"):
                data = -fhat_eval(space.to_nodal(c), self.potential) / self.eps
        else:
            data = self.S / self.eps * space.to_nodal(c)
        if self.forcing is not None:
            data = data + np.reshape(self.forcing(t, *space.points()), -1)
        return space.load(data)

    def eigenbasis(self):
        """(lam, Q) with A Q = B Q diag(lam) and Q^T B Q = I."""
        space = self.space
        if isinstance(space, Space2D):
            mx, Qx = sla.eigh(space.sx.ops.A_x, space.sx.ops.B_x)
            my, Qy = sla.eigh(space.sy.ops.A_x, space.sy.ops.B_x)
            return np.add.outer(mx, my).reshape(-1), np.kron(Qx, Qy)
        return sla.eigh(space.ops.A_x, space.ops.B_x)

    def bootstrap(self, u0, tau, count):
        """``count`` states after u0 from the ESET implicit scheme (N = 3, tol 1e-12)."""
        spec = SchemeSpec(N=3, scheme="implicit", eps=self.eps, potential=self.potential,
                          tolerance=1e-12, forcing=self.forcing)
        states = []
        m = Marcher(self.space, spec, u0)
        for _ in range(count):
            slab = m.step(tau)
            states.append(slab.end_state())
        return states


def _check(c, step):
    if not np.all(np.isfinite(c)) or np.max(np.abs(c)) > BLOWUP:
        raise BlowUp("solution blew up", step)


def _steps(tau, T):
    n = int(round(T / tau))
    if n < 1 or abs(n * tau - T) > 1e-9 * max(T, 1.0):
        raise ValueError(f"T={T} is not a whole number of steps of {tau}")
    return n


def imex4_march(system, u0, tau, T, t0=0.0, start=None):
    """BDF4 on the linear part with fourth-order extrapolation of the nonlinear part.

    ``start`` supplies the three states after u0; by default they come from
    the implicit ESET scheme.
    """
    n_steps = _steps(tau, T)
    B = system.space.mass
    lu = spla.splu(((25.0 / 12.0) * B + tau * system.linear_matrix()).tocsc())
    if start is None:
        if not system.reaction:
            raise ValueError("the ESET bootstrap needs the reaction term; pass start states")
        start = system.bootstrap(u0, tau, min(3, n_steps))
    states = [np.asarray(u0, float)] + [np.asarray(c, float) for c in start[: min(3, n_steps)]]
    times = [t0 + k * tau for k in range(len(states))]
    N_hist = [system.nonlinear(c, t) for c, t in zip(states, times)]
    for n in range(3, n_steps):
        c3, c2, c1, c0 = states[-1], states[-2], states[-3], states[-4]
        hist = 4.0 * c3 - 3.0 * c2 + (4.0 / 3.0) * c1 - 0.25 * c0
        ext = 4.0 * N_hist[-1] - 6.0 * N_hist[-2] + 4.0 * N_hist[-3] - N_hist[-4]
        c_new = lu.solve(B @ hist + tau * ext)
        _check(c_new, n + 1)
        t_new = t0 + (n + 1) * tau
        states.append(c_new)
        times.append(t_new)
        N_hist.append(system.nonlinear(c_new, t_new))
    return Trajectory(times, states)


def etdrk4_coefficients(z, n_circle=32, radius=1.0):
    """phi-function combinations of Kassam & Trefethen by contour averaging.

    Returns ``(e, e2, q, f1, f2, f3)`` divided by the step, i.e. the caller
    multiplies q, f1, f2, f3 by tau.
    """
    z = np.asarray(z, dtype=float)
    roots = radius * np.exp(1j * np.pi * (np.arange(1, n_circle + 1) - 0.5) / n_circle)
    r = z[..., None] + roots
    er = np.exp(r)
    q = np.real(np.mean((np.exp(r / 2) - 1.0) / r, axis=-1))
    f1 = np.real(np.mean((-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / r**3, axis=-1))
    f2 = np.real(np.mean((2.0 + r + er * (r - 2.0)) / r**3, axis=-1))
    f3 = np.real(np.mean((-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / r**3, axis=-1))
    return np.exp(z), np.exp(z / 2), q, f1, f2, f3


def phi1(z, n_circle=32, radius=1.0):
    """(e^z - 1)/z by contour averaging, finite at z = 0."""
    z = np.asarray(z, dtype=float)
    roots = radius * np.exp(1j * np.pi * (np.arange(1, n_circle + 1) - 0.5) / n_circle)
    r = z[..., None] + roots
    return np.real(np.mean((np.exp(r) - 1.0) / r, axis=-1))


def etdrk4_march(system, u0, tau, T, t0=0.0):
    """Fourth-order exponential time differencing Runge-Kutta in the (A, B) eigenbasis."""
    n_steps = _steps(tau, T)
    lam, Q = system.eigenbasis()
    B = system.space.mass
    lin = -(system.eps * lam + system.S / system.eps)
    e, e2, q, f1, f2, f3 = etdrk4_coefficients(tau * lin)
    q, f1, f2, f3 = tau * q, tau * f1, tau * f2, tau * f3

    def nl(w, t):
        return Q.T @ system.nonlinear(Q @ w, t)

    w = Q.T @ (B @ np.asarray(u0, float))
    times, states = [t0], [np.asarray(u0, float)]
    for n in range(n_steps):
        t = t0 + n * tau
        Nv = nl(w, t)
        a = e2 * w + q * Nv
        Na = nl(a, t + tau / 2)
        b = e2 * w + q * Na
        Nb = nl(b, t + tau / 2)
        c = e2 * a + q * (2.0 * Nb - Nv)
        Nc = nl(c, t + tau)
        w = e * w + f1 * Nv + 2.0 * f2 * (Na + Nb) + f3 * Nc
        c_new = Q @ w
        _check(c_new, n + 1)
        times.append(t + tau)
        states.append(c_new)
    return Trajectory(times, states)
