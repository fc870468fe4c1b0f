"""Deterministic CSV emission with a commented metadata header."""
from pathlib import Path

import numpy as np

from .config import SCHEMA_VERSION

TRACE_COLUMNS = ("step", "time", "energy", "modified_energy", "mass", "picard_iters", "wall_ms")
CONV_COLUMNS = ("tau", "error_l2", "error_h1", "order", "wall_ms")


def format_value(value):
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.17g" % float(value)


def header_lines(kind, config=None, meta=None):
    lines = [f"# schema: {SCHEMA_VERSION}", f"# table: {kind}"]
    for key, value in (meta or {}).items():
        lines.append(f"# meta: {key} = {value}")
    if config is not None:
        lines.extend(f"# config: {line}" for line in config.to_text().splitlines())
    return lines


def write_csv(path, kind, columns, rows, config=None, meta=None):
    """Write ``rows`` (sequences in ``columns`` order) under a ``#`` header; returns the path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    out = header_lines(kind, config, meta)
    out.append(",".join(columns))
    out.extend(",".join(format_value(v) for v in row) for row in rows)
    path.write_text("\n".join(out) + "\n")
    return path


def trace_rows(records, timing=True):
    for r in records:
        wall = 1e3 * r.wall_time if timing else 0.0
        yield (r.step, r.time, r.energy, r.modified_energy, r.mass, r.picard_iters, wall)


def conv_rows(table, timing=True):
    for r in table.rows:
        yield (r.tau, r.error_l2, r.error_h1, r.order, 1e3 * r.wall_time if timing else 0.0)


def write_trace(prefix, records, config=None, meta=None, timing=True):
    return write_csv(f"{prefix}_trace.csv", "trace", TRACE_COLUMNS, trace_rows(records, timing), config, meta)


def write_conv(prefix, table, config=None, meta=None, timing=True):
    meta = dict(meta or {})
    meta.setdefault("method", table.label)
    for key, value in table.extra.items():
        if key != "in_slab_l2":
            meta.setdefault(key, value)
    failed = [f"{r.tau!r}: {r.status}" for r in table.rows if r.status != "ok"]
    if failed:
        meta["failed"] = "; ".join(failed)
    return write_csv(f"{prefix}_conv.csv", "convergence", CONV_COLUMNS, conv_rows(table, timing), config, meta)


def read_csv(path):
    """Return ``(meta lines, columns, float array)`` of a file written by :func:`write_csv`."""
    text = Path(path).read_text().splitlines()
    meta = [line for line in text if line.startswith("#")]
    body = [line for line in text if not line.startswith("#")]
    columns = body[0].split(",")
    data = np.array([[float(v) for v in line.split(",")] for line in body[1:]]).reshape(-1, len(columns))
    return meta, columns, data
