"""Manufactured-solution problems and the time-step convergence harness."""
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .baselines import BLOWUP, SemilinearSystem, etdrk4_march, imex4_march
from .diagnostics import (
    ConvergenceRow,
    ConvergenceTable,
    error_norms,
    manufactured_exact,
    manufactured_forcing,
    manufactured_solution,
)
from .legendre import gauss_rule
from .marching import MarchError, SchemeSpec, iter_march
from .potentials import PotentialSpec
from .solvers import SolverError
from .spatial import make_space

INTEGRATORS = ("eset", "imex4", "etdrk4")


@dataclass
class ManufacturedProblem:
    """1D tanh-front problem with the forcing that makes it an exact solution."""

    eps: float = 0.05
    M: int = 255
    T: float = 0.32
    kind: str = "dirichlet"
    potential: PotentialSpec = PotentialSpec()

    @cached_property
    def space(self):
        return make_space(self.kind, self.M)

    @property
    def forcing(self):
        return manufactured_forcing(self.eps, self.potential, self.kind)

    def initial(self):
        return self.space.project(lambda x: manufactured_solution(x, 0.0, self.eps, self.kind)[0])

    def exact(self, t):
        return manufactured_exact(self.eps, t, self.kind)

    def error(self, coeffs, t=None):
        return error_norms(self.space, coeffs, self.exact(self.T if t is None else t))

    def spec(self, **kw):
        """SchemeSpec for this problem; keyword arguments override the defaults."""
        kw.setdefault("eps", self.eps)
        kw.setdefault("potential", self.potential)
        pot = kw["potential"]
        return SchemeSpec(forcing=manufactured_forcing(self.eps, pot, self.kind), **kw)


def check_taus(taus, rtol=1e-9):
    taus = [float(t) for t in taus]
    if len(taus) < 3:
        raise ValueError("a convergence study needs at least 3 time steps")
    for a, b in zip(taus, taus[1:]):
        if abs(a - 2.0 * b) > rtol * a:
            raise ValueError(f"time steps must halve: {a} -> {b}")
    return taus


def _steps(problem, tau):
    n = int(round(problem.T / tau))
    if n < 1 or abs(n * tau - problem.T) > 1e-9 * problem.T:
        raise ValueError(f"T={problem.T} is not a whole number of steps of {tau}")
    return n


def _in_slab_error(problem, slab, n_time):
    """Squared L2-in-time error of one slab, by Gauss quadrature in time."""
    quad = gauss_rule(n_time)
    states = slab.evaluate(quad.nodes)
    total = 0.0
    for w, xi, c in zip(quad.weights, quad.nodes, states):
        t = slab.t_start + 0.5 * slab.tau * (1.0 + xi)
        total += w * error_norms(problem.space, c, problem.exact(t))[0] ** 2
    return 0.5 * slab.tau * total


def _run_eset(problem, spec, tau, in_slab):
    records, slab, in_sq = [], None, 0.0
    for s, rec in iter_march(problem.initial(), spec, problem.space, [(tau, _steps(problem, tau))]):
        records.append(rec)
        if s is None:
            continue
        slab = s
        if in_slab:
            in_sq += _in_slab_error(problem, slab, spec.N + 4)
    return slab.end_state(), records, (math.sqrt(in_sq) if in_slab else None)


def _run_baseline(problem, integrator, S, tau):
    pot = replace(problem.potential, S=S)
    system = SemilinearSystem(problem.space, problem.eps, pot, manufactured_forcing(problem.eps, pot, problem.kind))
    run = imex4_march if integrator == "imex4" else etdrk4_march
    return run(system, problem.initial(), tau, problem.T).final, [], None


def _one_row(problem, integrator, spec, tau, in_slab):
    start = time.perf_counter()
    try:
        if integrator == "eset":
            final, records, in_err = _run_eset(problem, spec, tau, in_slab)
        else:
            S = spec.S if spec is not None else problem.potential.S
            final, records, in_err = _run_baseline(problem, integrator, S, tau)
    except (MarchError, SolverError, FloatingPointError) as exc:
        return ConvergenceRow(tau, np.nan, np.nan, wall_time=time.perf_counter() - start,
                              status=f"blow-up: {exc}")
    wall = time.perf_counter() - start
    l2, h1 = problem.error(final)
    if not (np.isfinite(l2) and l2 < BLOWUP):
        return ConvergenceRow(tau, np.nan, np.nan, wall_time=wall, status="blow-up: non-finite error")
    return ConvergenceRow(tau, l2, h1, wall_time=wall, records=records, in_slab_l2=in_err)


def method_label(integrator, spec=None):
    return spec.name if integrator == "eset" else integrator.upper()


def convergence_study(problem, taus, spec=None, integrator="eset", in_slab=False, workers=1):
    """Final-time errors and observed orders for a halving sequence of steps.

    Failed runs stay in the table with NaN errors and a ``blow-up`` status.
    With ``in_slab`` the ESET rows also carry the L2-in-time error over the
    whole march (``row.in_slab_l2``).  Runs for different steps are
    independent and may execute on ``workers`` threads; row order always
    follows ``taus``.
    """
    if integrator not in INTEGRATORS:
        raise ValueError(f"unknown integrator {integrator!r}; expected one of {INTEGRATORS}")
    taus = check_taus(taus)
    if integrator == "eset" and spec is None:
        spec = problem.spec()

    def job(tau):
        return _one_row(problem, integrator, spec, tau, in_slab)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(job, taus))
    else:
        rows = [job(t) for t in taus]
    table = ConvergenceTable(method_label(integrator, spec), rows,
                             extra={"integrator": integrator, "eps": problem.eps, "M": problem.M,
                                    "T": problem.T, "basis": problem.kind})
    table.fill_orders()
    if in_slab:
        table.extra["in_slab_l2"] = [r.in_slab_l2 for r in rows]
    return table


def in_slab_orders(table):
    errs = np.array([np.nan if e is None else e for e in table.extra.get("in_slab_l2", [])], float)
    return np.log2(errs[:-1] / errs[1:])
