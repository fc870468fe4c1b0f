"""Energy, mass, manufactured solutions and error norms."""
from dataclasses import asdict, dataclass, field

import numpy as np

from .potentials import F_eval, PotentialSpec, f_eval


@dataclass
class DiagnosticsRecord:
    step: int
    time: float
    energy: float
    modified_energy: float
    mass: float
    picard_iters: int
    wall_time: float

    def as_row(self):
        return asdict(self)


def energy(space, coeffs, eps, potential=PotentialSpec()):
    """Ginzburg-Landau energy: stiffness quadratic form plus nodal quadrature of F."""
    bulk = space.integrate(F_eval(space.to_nodal(coeffs), potential))
    return 0.5 * eps * space.energy_gradient(coeffs) + float(bulk) / eps


def total_mass(space, coeffs):
    return float(space.mass_of(coeffs))


def _sech2(z):
    th = np.tanh(z)
    return 1.0 - th * th


def manufactured_solution(x, t, eps, bc="dirichlet"):
    """Tanh front moving right with unit speed, corrected to satisfy the boundary condition.

    For ``bc="dirichlet"`` a linear correction makes u vanish at x = +-1; for
    ``bc="neumann"`` a quadratic one makes u_x vanish there.
    Returns ``(u, u_t, u_x, u_xx)``.
    """
    x = np.asarray(x, dtype=float)
    th = np.tanh((x - t) / eps)
    s2 = 1.0 - th * th
    u, u_t, u_x, u_xx = th, -s2 / eps, s2 / eps, -2.0 * th * s2 / eps**2
    if bc == "dirichlet":
        a = np.tanh((1.0 - t) / eps)
        b = np.tanh((-1.0 - t) / eps)
        a_t = -_sech2((1.0 - t) / eps) / eps
        b_t = -_sech2((-1.0 - t) / eps) / eps
        u = u - 0.5 * ((x + 1.0) * a + (1.0 - x) * b)
        u_t = u_t - 0.5 * ((x + 1.0) * a_t + (1.0 - x) * b_t)
        u_x = u_x - 0.5 * (a - b)
    elif bc == "neumann":
        # slopes of the front at the two ends and their time derivatives
        wp, wm = (1.0 - t) / eps, (-1.0 - t) / eps
        sp, sm = _sech2(wp) / eps, _sech2(wm) / eps
        sp_t = 2.0 * _sech2(wp) * np.tanh(wp) / eps**2
        sm_t = 2.0 * _sech2(wm) * np.tanh(wm) / eps**2
        qp, qm = (x + 1.0) ** 2, (x - 1.0) ** 2
        u = u - 0.25 * (sp * qp - sm * qm)
        u_t = u_t - 0.25 * (sp_t * qp - sm_t * qm)
        u_x = u_x - 0.5 * (sp * (x + 1.0) - sm * (x - 1.0))
        u_xx = u_xx - 0.5 * (sp - sm)
    else:
        raise ValueError(f"unknown boundary condition {bc!r}")
    return u, u_t, u_x, u_xx


def manufactured_reference(x, t, eps, potential=PotentialSpec(), bc="dirichlet"):
    """Reference value and the forcing g = u_t - eps u_xx + f(u)/eps that it needs."""
    u, u_t, _, u_xx = manufactured_solution(x, t, eps, bc)
    return u, u_t - eps * u_xx + f_eval(u, potential) / eps


def manufactured_forcing(eps, potential=PotentialSpec(), bc="dirichlet"):
    """Forcing callable ``g(t, x)`` for the marching schemes."""

    def g(t, x):
        return manufactured_reference(x, t, eps, potential, bc)[1]

    return g


def manufactured_exact(eps, t, bc="dirichlet"):
    """Reference as ``(values, gradients)`` callable for :func:`error_norms`."""

    def ref(x):
        u, _, u_x, _ = manufactured_solution(x, t, eps, bc)
        return u, (u_x,)

    return ref


def _nodal(space, field):
    if callable(field):
        vals, grads = field(*space.points())
        return np.reshape(vals, -1), [np.reshape(g, -1) for g in grads]
    return space.to_nodal(field), list(space.gradient(field))


def error_norms(space, a, b):
    """L2 and H1 norms of ``a - b``; each side is modal coefficients or a reference callable."""
    va, ga = _nodal(space, a)
    vb, gb = _nodal(space, b)
    l2sq = float(space.integrate((va - vb) ** 2))
    semi = sum(float(space.integrate((x - y) ** 2)) for x, y in zip(ga, gb))
    return np.sqrt(l2sq), np.sqrt(l2sq + semi)


@dataclass
class ConvergenceRow:
    tau: float
    error_l2: float
    error_h1: float
    order: float = np.nan
    wall_time: float = 0.0
    status: str = "ok"
    records: list = field(default_factory=list, repr=False)
    in_slab_l2: float = None


@dataclass
class ConvergenceTable:
    label: str
    rows: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def taus(self):
        return np.array([r.tau for r in self.rows])

    @property
    def errors(self):
        return np.array([r.error_l2 for r in self.rows])

    def fill_orders(self):
        for prev, row in zip(self.rows, self.rows[1:]):
            if prev.status == "ok" and row.status == "ok":
                row.order = np.log(prev.error_l2 / row.error_l2) / np.log(prev.tau / row.tau)
        return self

    def slope(self, floor=1e-11):
        return fit_order(self.taus, self.errors, floor)


def fit_order(taus, errors, floor=1e-11):
    """Least-squares slope of log2(error) against log2(tau), ignoring errors below ``floor``."""
    taus, errors = np.asarray(taus, float), np.asarray(errors, float)
    keep = np.isfinite(errors) & (errors >= floor)
    if keep.sum() < 2:
        return np.nan
    return float(np.polyfit(np.log2(taus[keep]), np.log2(errors[keep]), 1)[0])
