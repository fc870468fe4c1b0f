"""Energetic spectral-element time marching.

On each slab [t_{n-1}, t_n], mapped to xi in [-1, 1], the solution is

    h(x, xi) = sum_{i=0}^{N} phi_i(xi) H[i](x),

with H[0] pinned to the end state of the previous slab.  Testing with
v_xi = phi_i' psi_j (i = 1..N) gives the constant-coefficient system solved in
:mod:`eset.solvers`; the nonlinearity enters only through the right-hand side.

A slab is advanced by Picard sweeps.  Sweep k evaluates f_hat on the previous
iterate (the extrapolated previous slab for k = 1), so one sweep is the
semi-implicit scheme and sweeping to convergence gives the implicit scheme.
"""
import logging
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .diagnostics import DiagnosticsRecord, energy, total_mass
from .legendre import MAX_TEMPORAL_DEGREE, extension_constants, gauss_rule, phi_table, temporal_matrices
from .potentials import PotentialSpec, cutoff, f_eval, fhat_eval
from .solvers import SolverError, make_slab_solver

log = logging.getLogger(__name__)

SCHEMES = ("implicit", "semi_implicit", "picard")
EQUATIONS = ("standard_AC", "conservative_AC")
MAX_SWEEPS = 50
BOOTSTRAP_TOL = 1e-12
# max |f'| on [-1, 1] for the quartic, used where the potential has no global bound
MAX_PRINCIPLE_LIPSCHITZ = 2.0
# coefficient magnitude treated as a blow-up
BLOWUP = 1e6


class MarchError(RuntimeError):
    def __init__(self, message, step=None):
        super().__init__(message if step is None else f"slab {step}: {message}")
        self.step = step


class PicardDivergence(MarchError):
    def __init__(self, message, ratio, step=None):
        super().__init__(message, step)
        self.ratio = ratio


@dataclass(frozen=True)
class SchemeSpec:
    """Time discretization settings.

    ``picard`` with ``picard_iters = k`` is the ESET{N}{k} scheme; the
    semi-implicit scheme is the same path with a single sweep.
    """

    N: int = 3
    scheme: str = "semi_implicit"
    picard_iters: int = 1
    eps: float = 0.05
    potential: PotentialSpec = PotentialSpec()
    tolerance: float = 1e-12
    equation: str = "standard_AC"
    solver: str = "diagonalized"
    forcing: object = None
    max_sweeps: int = MAX_SWEEPS

    def __post_init__(self):
        if not 1 <= self.N <= MAX_TEMPORAL_DEGREE:
            raise ValueError(f"N must be in 1..{MAX_TEMPORAL_DEGREE}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.equation not in EQUATIONS:
            raise ValueError(f"unknown equation {self.equation!r}")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.scheme == "picard" and self.picard_iters < 1:
            raise ValueError("picard_iters must be >= 1")

    @property
    def S(self):
        return self.potential.S

    @property
    def sweeps(self):
        """Fixed sweep count, or None when iterating to tolerance."""
        if self.scheme == "implicit":
            return None
        return 1 if self.scheme == "semi_implicit" else self.picard_iters

    @property
    def name(self):
        if self.scheme == "implicit":
            return f"ESET{self.N}-implicit"
        return f"ESET{self.N}{self.sweeps}"

    @property
    def lipschitz(self):
        """Bound of |f'| used by step conditions (max-principle value for the quartic)."""
        return self.potential.L if self.potential.truncated else MAX_PRINCIPLE_LIPSCHITZ

    def step_ratio(self, tau):
        """tau L / eps; the implicit slab problem is uniquely solvable below 1."""
        return tau * self.lipschitz / self.eps

    def modified_energy_weight(self, tau):
        C = extension_constants(self.N - 1).C_N
        return (tau * self.lipschitz * C) ** 2 / (2.0 * self.eps**2)

    def semi_implicit_step_bound(self):
        """Largest tau L / eps for which the modified energy is guaranteed to decay."""
        C = extension_constants(self.N - 1).C_N
        return math.sqrt(14.0) / (4.0 * math.sqrt(2.0 + C * C))


@dataclass
class TimeSlab:
    n: int
    t_start: float
    t_end: float
    H: np.ndarray
    picard_iters: int = 0
    sweep_norms: list = field(default_factory=list)

    @property
    def tau(self):
        return self.t_end - self.t_start

    def end_state(self):
        return self.H[0] + self.H[1]

    def evaluate(self, xi):
        """Modal coefficients at reference times ``xi`` (may lie outside [-1, 1])."""
        vals, _ = phi_table(self.H.shape[0] - 1, np.atleast_1d(xi))
        return vals.T @ self.H


def extrapolate_prev(prev, xi):
    """Previous slab polynomial continued to the next slab: h^{n-1}(xi + 2)."""
    return prev.evaluate(np.asarray(xi, dtype=float) + 2.0)


def _shift_matrix(N):
    """X with phi_k(xi + 2) = sum_i X[i, k] phi_i(xi)."""
    nodes = gauss_rule(N + 1).nodes
    P, _ = phi_table(N, nodes)
    Ps, _ = phi_table(N, nodes + 2.0)
    return np.linalg.solve(P.T, Ps.T)


class SlabAssembler:
    """Per-(space, N) quadrature tables used by every slab."""

    def __init__(self, space, N):
        self.space, self.N = space, N
        self.tm = temporal_matrices(N)
        self.quad = gauss_rule(2 * N + 2)
        self.phi, self.dphi = phi_table(N, self.quad.nodes)
        self.phi_ext, _ = phi_table(N, self.quad.nodes + 2.0)
        # row i: w_q phi_i'(xi_q) for i = 1..N
        self.test = self.dphi[1:] * self.quad.weights
        self.shift = _shift_matrix(N)

    def times(self, t0, tau):
        return t0 + 0.5 * tau * (1.0 + self.quad.nodes)

    def values(self, H, extrapolated=False):
        """Nodal values on the (time-node, space-node) grid of a slab tensor."""
        table = self.phi_ext if extrapolated else self.phi
        return self.space.to_nodal(table.T @ H)

    def time_derivative_norm(self, D, tau):
        """||d_t||_n over the slab for mode rows D[1..N]."""
        D = D[1:]
        BD = (self.space.mass @ D.T).T
        val = (2.0 / tau) * float(np.sum(np.diag(self.tm.A_xi)[:, None] * D * BD))
        return math.sqrt(max(val, 0.0))


def assemble_nonlinear_rhs(gval, asm):
    """F[i, j] = -int (g(xi), psi_j) phi_i'(xi) dxi for nodal data ``gval``."""
    gval = np.asarray(gval, dtype=float)
    expected = (asm.quad.order, asm.space.grid_size)
    if gval.shape != expected:
        raise ValueError(f"nonlinear data has shape {gval.shape}, expected {expected}")
    return -(asm.test @ asm.space.load(gval))


def assemble_initial_rhs(h_init, asm, eps, S):
    """Right-hand side from the pinned row; only the phi_1 row is nonzero."""
    space = asm.space
    R = np.zeros((asm.N, space.size))
    R[0] = -(eps * (space.stiffness @ h_init) + (S / eps) * (space.mass @ h_init))
    return R


def compute_alpha(fvals, space):
    """Domain average of f at each time node."""
    return np.asarray(fvals) @ space.weights / space.measure


class Marcher:
    """Sequential slab-by-slab driver holding the march state and solver cache."""

    def __init__(self, space, spec, initial, t0=0.0):
        self.space, self.spec = space, spec
        self.asm = SlabAssembler(space, spec.N)
        initial = space.check(initial)
        H = np.zeros((spec.N + 1, space.size))
        H[0] = initial
        self.current = TimeSlab(0, t0, t0, H)
        self.previous = None
        self.steps = 0
        self._solvers = {}
        self._warned = False

    @property
    def time(self):
        return self.current.t_end

    @property
    def state(self):
        return self.current.end_state() if self.steps else self.current.H[0]

    def solver(self, tau):
        key = (tau, self.spec.eps, self.spec.S, self.spec.N, self.space.shape, self.spec.solver)
        if key not in self._solvers:
            self._solvers[key] = make_slab_solver(
                self.spec.solver, self.space, self.asm.tm, tau, self.spec.eps, self.spec.S
            )
        return self._solvers[key]

    def _data(self, values, times):
        spec = self.spec
        with np.errstate(over="ignore", invalid="ignore"):
            data = fhat_eval(values, spec.potential)
        if spec.equation == "conservative_AC":
            with np.errstate(over="ignore", invalid="ignore"):
                alpha = compute_alpha(f_eval(values, spec.potential), self.space)
            data = data - alpha[:, None]
        if spec.forcing is not None:
            g = np.stack([np.reshape(spec.forcing(t, *self.space.points()), -1) for t in times])
            data = data - spec.eps * g
        return data

    def step(self, tau, sweeps=None):
        """Advance one slab of length ``tau``.

        ``sweeps`` overrides the scheme for this slab: a positive count fixes
        the Picard sweeps, 0 iterates to tolerance.
        """
        spec, asm = self.spec, self.asm
        n = self.steps + 1
        if spec.step_ratio(tau) > 1 and not self._warned:
            log.warning("tau L / eps = %.3g exceeds 1; implicit slab solvability not guaranteed",
                        spec.step_ratio(tau))
            self._warned = True
        h0 = self.state
        t0 = self.time
        times = asm.times(t0, tau)
        solver = self.solver(tau)
        R = assemble_initial_rhs(h0, asm, spec.eps, spec.S)

        prev = self.current if self.steps else None
        if prev is None:
            # first slab: constant-in-time guess, always iterated to convergence
            H = np.zeros((spec.N + 1, self.space.size))
            H[0] = h0
            sweeps, tol = None, BOOTSTRAP_TOL
        else:
            H = asm.shift @ prev.H
            H[0] = h0
            sweeps = spec.sweeps if sweeps is None else (sweeps or None)
            tol = spec.tolerance

        norms, k = [], 0
        while True:
            k += 1
            values = asm.values(prev.H, extrapolated=True) if (k == 1 and prev is not None) else asm.values(H)
            F = assemble_nonlinear_rhs(self._data(values, times), asm)
            if not np.all(np.isfinite(F)):
                raise MarchError(f"non-finite nonlinear data in sweep {k}", n)
            H_new = np.empty_like(H)
            H_new[0] = h0
            H_new[1:] = solver.solve(F / spec.eps + R)
            if not np.all(np.abs(H_new) < BLOWUP):
                raise MarchError(f"slab solution blew up in sweep {k}", n)
            d_norm = asm.time_derivative_norm(H_new - H, tau)
            norms.append(d_norm)
            H = H_new
            if sweeps is not None:
                if k >= sweeps:
                    break
                continue
            scale = asm.time_derivative_norm(H, tau) + math.sqrt(
                float(h0 @ (self.space.mass @ h0)) / tau
            )
            if d_norm <= tol * scale:
                break
            if k >= spec.max_sweeps:
                ratio = norms[-1] / norms[-2] if len(norms) > 1 and norms[-2] > 0 else np.inf
                raise PicardDivergence(
                    f"Picard iteration did not converge in {k} sweeps (last ratio {ratio:.3g})", ratio, n
                )

        slab = TimeSlab(n, t0, t0 + tau, H, k, norms)
        if spec.potential.cutoff_enabled:
            end = slab.end_state()
            clamped = self.space.to_modal(cutoff(self.space.to_nodal(end)))
            slab.H[1] += clamped - end
        self.previous, self.current = self.current, slab
        self.steps = n
        return slab

    def record(self, slab, wall):
        spec = self.spec
        end = slab.end_state()
        E = energy(self.space, end, spec.eps, spec.potential)
        ht = self.asm.time_derivative_norm(slab.H, slab.tau)
        return DiagnosticsRecord(
            step=slab.n,
            time=slab.t_end,
            energy=E,
            modified_energy=E + spec.modified_energy_weight(slab.tau) * ht * ht,
            mass=total_mass(self.space, end),
            picard_iters=slab.picard_iters,
            wall_time=wall,
        )

    def initial_record(self):
        spec, h0 = self.spec, self.state
        E = energy(self.space, h0, spec.eps, spec.potential)
        return DiagnosticsRecord(0, self.time, E, E, total_mass(self.space, h0), 0, 0.0)


def expand_schedule(schedule):
    for tau, steps in schedule:
        if not tau > 0:
            raise ValueError(f"time step must be positive, got {tau}")
        if steps < 0:
            raise ValueError("step count must be nonnegative")
        for _ in range(int(steps)):
            yield tau


def ramp_schedule(T, ramp=(), tau=None, t0=0.0):
    """Schedule running the ``ramp`` (tau, steps) pairs then ``tau`` until exactly T.

    The final step is shortened if needed so the march lands on T.
    """
    schedule, t = [], t0
    for tau_r, steps in ramp:
        steps = min(int(steps), int(math.floor((T - t) / tau_r + 1e-9)))
        if steps > 0:
            schedule.append((tau_r, steps))
            t += steps * tau_r
    if tau is not None and T - t > 1e-12 * max(T, 1.0):
        whole = int(math.floor((T - t) / tau + 1e-9))
        if whole:
            schedule.append((tau, whole))
            t += whole * tau
        rest = T - t
        if rest > 1e-12 * max(T, 1.0):
            schedule.append((rest, 1))
    return schedule


def iter_march(initial, spec, space, schedule, t0=0.0):
    """Yield ``(slab, record)`` per slab; the first item is ``(None, initial record)``."""
    m = Marcher(space, spec, initial, t0)
    yield None, m.initial_record()
    for tau in expand_schedule(schedule):
        start = time.perf_counter()
        try:
            slab = m.step(tau)
        except SolverError as exc:
            raise MarchError(str(exc), m.steps + 1) from exc
        yield slab, m.record(slab, time.perf_counter() - start)


def march(initial, spec, space, schedule, t0=0.0):
    """Advance ``initial`` through ``schedule``; returns ``(final slab, records)``.

    With an empty schedule the returned slab holds the initial state in row 0.
    """
    records, last = [], None
    for slab, rec in iter_march(initial, spec, space, schedule, t0):
        records.append(rec)
        last = slab if slab is not None else last
    if last is None:
        H = np.zeros((spec.N + 1, space.size))
        H[0] = space.check(initial)
        last = TimeSlab(0, t0, t0, H)
    return last, records


def final_state(slab):
    return slab.end_state() if slab.n else slab.H[0]


def with_scheme(spec, scheme, k=1):
    return replace(spec, scheme=scheme, picard_iters=k)


def semi_implicit_step(marcher, tau):
    """One slab with a single sweep, whatever the marcher's configured scheme."""
    return marcher.step(tau, sweeps=1)


def implicit_step(marcher, tau):
    """One slab iterated to tolerance; returns the slab and its sweep count."""
    slab = marcher.step(tau, sweeps=0)
    return slab, slab.picard_iters
