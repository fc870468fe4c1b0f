"""Run orchestration for configs: marching, convergence studies and trace checks."""
from dataclasses import dataclass, field

import numpy as np

from .convergence import convergence_study
from .marching import iter_march
from .output import write_conv, write_trace


@dataclass
class RunResult:
    config: object
    space: object
    records: list
    final: np.ndarray
    error: tuple = None
    files: list = field(default_factory=list)


def march_config(config):
    """March ``config`` to its final time; MarchError propagates failures and blow-ups."""
    space = config.space()
    spec = config.scheme_spec()
    records, slab = [], None
    for s, rec in iter_march(config.initial(space), spec, space, config.schedule()):
        records.append(rec)
        if s is not None:
            slab = s
    final = slab.end_state()
    error = None
    if config.ic == "manufactured":
        error = config.problem().error(final, slab.t_end)
    return RunResult(config, space, records, final, error)


def run_config(config, prefix=None, meta=None):
    """March and write ``<prefix>_trace.csv`` (prefix defaults to ``config.output``)."""
    result = march_config(config)
    meta = dict(meta or {})
    if result.error is not None:
        meta["final_error_l2"] = "%.17g" % result.error[0]
        meta["final_error_h1"] = "%.17g" % result.error[1]
    prefix = prefix or config.output
    result.files.append(write_trace(prefix, result.records, config, meta, config.timing))
    return result


def converge_config(config, taus, prefix=None, meta=None, workers=1, in_slab=False):
    """Convergence study of a manufactured config; writes conv and finest-step trace CSVs."""
    problem = config.problem()
    spec = config.scheme_spec() if config.integrator == "eset" else None
    if spec is None:
        table = convergence_study(problem, taus, integrator=config.integrator, workers=workers)
    else:
        table = convergence_study(problem, taus, spec, in_slab=in_slab, workers=workers)
    prefix = prefix or config.output
    meta = dict(meta or {})
    meta.setdefault("taus", " ".join(repr(float(t)) for t in taus))
    files = [write_conv(prefix, table, config, meta, config.timing)]
    ok = [r for r in table.rows if r.status == "ok" and r.records]
    if ok:
        trace_meta = dict(meta, trace_tau=repr(ok[-1].tau))
        files.append(write_trace(prefix, ok[-1].records, config, trace_meta, config.timing))
    return table, files


def max_increase(records, attr="energy"):
    """Largest step-to-step increase of ``attr`` (negative when strictly decreasing)."""
    values = np.array([getattr(r, attr) for r in records])
    if len(values) < 2:
        return -np.inf
    return float(np.max(np.diff(values)))


def max_mass_drift(records):
    masses = np.array([r.mass for r in records])
    return float(np.max(np.abs(masses - masses[0])))
