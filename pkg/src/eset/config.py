"""Flat ``key = value`` run configuration."""
import math
from dataclasses import dataclass, fields, replace

import numpy as np

from .convergence import INTEGRATORS, ManufacturedProblem
from .diagnostics import manufactured_forcing, manufactured_solution
from .legendre import MAX_TEMPORAL_DEGREE
from .marching import SchemeSpec, ramp_schedule
from .potentials import POTENTIAL_KINDS, PotentialSpec
from .solvers import SOLVERS
from .spatial import KINDS, make_space

SCHEMA_VERSION = "eset-run/1"
INITIAL_CONDITIONS = ("manufactured", "random", "two_drops", "expr")
SCHEME_NAMES = ("eset", "picard", "semi_implicit", "implicit")
EQUATION_NAMES = {"standard": "standard_AC", "conservative": "conservative_AC",
                  "standard_AC": "standard_AC", "conservative_AC": "conservative_AC"}

# names visible to custom initial-condition expressions
EXPR_NAMESPACE = {name: getattr(np, name) for name in (
    "sin", "cos", "tan", "exp", "log", "sqrt", "tanh", "cosh", "sinh", "abs", "arctan",
    "arctan2", "hypot", "maximum", "minimum", "where", "sign", "pi",
)}


class ConfigError(ValueError):
    pass


def _bool(text):
    low = text.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected true/false, got {text!r}")


def _int(text):
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


def _choice(options):
    def parse(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {text!r}")
        return text
    return parse


def _centers(text):
    pts = []
    for chunk in text.split(";"):
        xy = [float(v) for v in chunk.split(",")]
        if len(xy) != 2:
            raise ValueError(f"drop center {chunk!r} must be 'x,y'")
        pts.append(tuple(xy))
    return tuple(pts)


def _ramp(text):
    if text.strip() in ("", "none"):
        return ()
    out = []
    for chunk in text.split(","):
        tau, _, count = chunk.strip().partition("x")
        if not count:
            raise ValueError(f"ramp entry {chunk!r} must look like '1e-5x99'")
        out.append((float(tau), _int(count)))
    return tuple(out)


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _fmt_ramp(ramp):
    return ", ".join(f"{t!r}x{n}" for t, n in ramp) if ramp else "none"


def _fmt_centers(centers):
    return "; ".join(f"{x!r},{y!r}" for x, y in centers)


_FORMATTERS = {"ramp": _fmt_ramp, "drop_centers": _fmt_centers}


@dataclass(frozen=True)
class RunConfig:
    scheme: str = "eset"
    N: int = 3
    picard_iters: int = 1
    S: float = 0.0
    eps: float = 0.05
    potential: str = "standard"
    M_cut: float = 1.0
    cutoff: bool = False
    equation: str = "standard_AC"
    solver: str = "diagonalized"
    tolerance: float = 1e-12
    integrator: str = "eset"
    basis: str = "dirichlet"
    M: int = 255
    dim: int = 1
    ic: str = "manufactured"
    seed: int = 42
    drop_centers: tuple = ((0.4, 0.0), (-0.4, 0.0))
    drop_radius: float = 0.38
    ic_expr: str = ""
    T: float = 0.32
    tau: float = 0.01
    ramp: tuple = ()
    timing: bool = True
    output: str = "eset_run"
    note: str = ""

    def validate(self, lines=None):
        lines = lines or {}

        def fail(key, msg):
            where = f"line {lines[key]}" if key in lines else "default"
            raise ConfigError(f"{where}: {key}: {msg}")

        if not 1 <= self.N <= MAX_TEMPORAL_DEGREE:
            fail("N", f"N must be in 1..{MAX_TEMPORAL_DEGREE}, got {self.N}")
        if self.picard_iters < 1:
            fail("picard_iters", "picard_iters must be >= 1")
        if not self.eps > 0:
            fail("eps", "eps must be > 0")
        if not self.tau > 0:
            fail("tau", "tau must be > 0")
        if not self.T > 0:
            fail("T", "T must be > 0")
        if self.M < 2:
            fail("M", "M must be >= 2")
        if self.S < 0:
            fail("S", "S must be >= 0")
        if self.M_cut < 1:
            fail("M_cut", "M_cut must be >= 1")
        if not self.tolerance > 0:
            fail("tolerance", "tolerance must be > 0")
        if self.dim not in (1, 2):
            fail("dim", "dim must be 1 or 2")
        for tau, _ in self.ramp:
            if not tau > 0:
                fail("ramp", "ramp steps must be > 0")
        if self.ic == "manufactured" and self.dim != 1:
            fail("ic", "the manufactured solution is one-dimensional")
        if self.ic == "two_drops" and self.dim != 2:
            fail("ic", "two_drops needs dim = 2")
        if self.ic == "expr" and not self.ic_expr:
            fail("ic_expr", "ic = expr needs ic_expr")
        if self.integrator != "eset" and self.ic != "manufactured":
            fail("integrator", "baseline integrators run only the manufactured problem")
        for key in ("note", "output", "ic_expr"):
            if "#" in getattr(self, key) or "\n" in getattr(self, key):
                fail(key, "value may not contain '#' or a newline")
        if self.ic_expr:
            try:
                compile(self.ic_expr, "<ic_expr>", "eval")
            except SyntaxError as exc:
                fail("ic_expr", f"invalid expression: {exc.msg}")
        return self

    # resolved objects

    def potential_spec(self):
        return PotentialSpec(kind=self.potential, M_cut=self.M_cut, S=self.S, cutoff_enabled=self.cutoff)

    def scheme_spec(self):
        pot = self.potential_spec()
        forcing = manufactured_forcing(self.eps, pot, self.basis) if self.ic == "manufactured" else None
        if self.scheme == "implicit":
            scheme, k = "implicit", 1
        elif self.scheme == "semi_implicit":
            scheme, k = "semi_implicit", 1
        else:
            scheme, k = "picard", self.picard_iters
        return SchemeSpec(N=self.N, scheme=scheme, picard_iters=k, eps=self.eps, potential=pot,
                          tolerance=self.tolerance, equation=self.equation, solver=self.solver,
                          forcing=forcing)

    def problem(self):
        """Manufactured problem matching this config (1D only)."""
        return ManufacturedProblem(eps=self.eps, M=self.M, T=self.T, kind=self.basis,
                                   potential=self.potential_spec())

    def space(self):
        return make_space(self.basis, self.M, dim=self.dim)

    def initial(self, space):
        if self.ic == "manufactured":
            return space.project(lambda x: manufactured_solution(x, 0.0, self.eps, self.basis)[0])
        if self.ic == "random":
            return space.random_field(self.seed)
        if self.ic == "two_drops":
            return space.project(lambda x, y: two_drops(x, y, self.drop_centers, self.drop_radius, self.eps))
        return space.project(lambda *xs: expression_field(self.ic_expr, xs, self.eps))

    def schedule(self):
        return ramp_schedule(self.T, self.ramp, self.tau)

    def to_text(self):
        out = []
        for f in fields(self):
            value = getattr(self, f.name)
            out.append(f"{f.name} = {_FORMATTERS.get(f.name, _fmt)(value)}\n")
        return "".join(out)


_PARSERS = {
    "scheme": _choice(SCHEME_NAMES),
    "N": _int,
    "picard_iters": _int,
    "S": float,
    "eps": float,
    "potential": _choice(POTENTIAL_KINDS),
    "M_cut": float,
    "cutoff": _bool,
    "equation": lambda s: EQUATION_NAMES[_choice(tuple(EQUATION_NAMES))(s)],
    "solver": _choice(tuple(SOLVERS)),
    "tolerance": float,
    "integrator": _choice(INTEGRATORS),
    "basis": _choice(KINDS),
    "M": _int,
    "dim": _int,
    "ic": _choice(INITIAL_CONDITIONS),
    "seed": _int,
    "drop_centers": _centers,
    "drop_radius": float,
    "ic_expr": str,
    "T": float,
    "tau": float,
    "ramp": _ramp,
    "timing": _bool,
    "output": str,
    "note": str,
}


def parse_config(text, **overrides):
    """Parse ``key = value`` lines (``#`` starts a comment) into a validated RunConfig."""
    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: {key} set twice (first on line {lines[key]})")
        try:
            values[key] = _PARSERS[key](value)
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"line {lineno}: {key}: {exc}") from None
        lines[key] = lineno
    values.update(overrides)
    return RunConfig(**values).validate(lines)


def header_config(text):
    """Config text recovered from the ``# config:`` lines of an emitted CSV."""
    prefix = "# config: "
    return "".join(line[len(prefix):] + "\n" for line in text.splitlines() if line.startswith(prefix))


def two_drops(x, y, centers, radius, eps):
    """Union of diffuse discs, +1 inside and -1 outside."""
    u = -np.ones(np.broadcast(x, y).shape)
    for cx, cy in centers:
        r = np.hypot(x - cx, y - cy)
        u = np.maximum(u, np.tanh((radius - r) / (math.sqrt(2.0) * eps)))
    return u


def expression_field(expr, coords, eps):
    names = dict(EXPR_NAMESPACE, eps=eps, x=coords[0])
    if len(coords) > 1:
        names["y"] = coords[1]
    try:
        value = eval(compile(expr, "<ic_expr>", "eval"), {"__builtins__": {}}, names)
    except Exception as exc:
        raise ConfigError(f"ic_expr: cannot evaluate {expr!r}: {exc}") from None
    return np.broadcast_to(np.asarray(value, dtype=float), np.broadcast(*coords).shape)


def with_overrides(config, **kw):
    return replace(config, **kw).validate()
