"""Command-line entry point: ``eset run|preset|converge|verify-constants``."""
import argparse
import logging
import math
import sys
from pathlib import Path

from .config import ConfigError, header_config, parse_config
from .legendre import extension_constants
from .marching import MarchError
from .presets import PRESETS, run_preset
from .runner import converge_config, run_config
from .solvers import SolverError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_ACCEPTANCE = 0, 2, 3, 4

# published values of c_k and C_k for k = 0..3
REFERENCE_CONSTANTS = {
    0: (1.0, 1.0),
    1: (13.0, math.sqrt(14.0)),
    2: (241.0, math.sqrt(255.0)),
    3: (5629.0, math.sqrt(5884.0)),
}


def load_config(path, **overrides):
    """Config from a key = value file, or from the header of an emitted CSV."""
    text = Path(path).read_text(encoding="utf-8")
    if text.startswith("# schema:"):
        text = header_config(text)
    return parse_config(text, **overrides)


def verify_constants(out=None, tol=1e-10, kmax=4):
    """Print c_k and C_k for k <= kmax; True when every published value matches."""
    out = out or sys.stdout
    ok = True
    print(f"{'k':>2} {'c_k':>22} {'C_k':>22}  status", file=out)
    for k in range(kmax + 1):
        ec = extension_constants(k)
        c_k = float(ec.c[k])
        ref = REFERENCE_CONSTANTS.get(k)
        if ref is None:
            status = "no reference"
        else:
            good = abs(c_k - ref[0]) <= tol * ref[0] and abs(ec.C_N - ref[1]) <= tol * ref[1]
            ok &= good
            status = "ok" if good else f"MISMATCH (expected {ref[0]:.17g}, {ref[1]:.17g})"
        print(f"{k:>2} {c_k:>22.15g} {ec.C_N:>22.15g}  {status}", file=out)
    return ok


def _cmd_run(args):
    cfg = load_config(args.config, **({"output": args.output} if args.output else {}))
    res = run_config(cfg)
    last = res.records[-1]
    msg = f"{cfg.scheme_spec().name}: {last.step} slabs to t={last.time:.6g}, energy {last.energy:.10g}, mass {last.mass:.10g}"
    if res.error is not None:
        msg += f", L2 error {res.error[0]:.3e}"
    print(msg)
    for f in res.files:
        print(f"wrote {f}")
    return EXIT_OK


def _cmd_converge(args):
    cfg = load_config(args.config, **({"output": args.output} if args.output else {}))
    if cfg.ic != "manufactured":
        raise ConfigError("converge needs ic = manufactured")
    table, files = converge_config(cfg, args.taus, workers=args.workers, in_slab=args.in_slab)
    print(f"{'tau':>12} {'L2 error':>12} {'H1 error':>12} {'order':>7}  status")
    for r in table.rows:
        print(f"{r.tau:>12.6g} {r.error_l2:>12.4e} {r.error_h1:>12.4e} {r.order:>7.3f}  {r.status}")
    slope = table.slope()
    print(f"{table.label}: regression order {slope:.3f}")
    for f in files:
        print(f"wrote {f}")
    if any(r.status != "ok" for r in table.rows) and args.expect_order is None:
        return EXIT_NUMERIC
    if args.expect_order is not None:
        passed = abs(slope - args.expect_order) <= args.order_tol
        print(f"{'PASS' if passed else 'FAIL'}: order {slope:.3f} vs {args.expect_order} +- {args.order_tol}")
        return EXIT_OK if passed else EXIT_ACCEPTANCE
    return EXIT_OK


def _cmd_preset(args):
    outcome = run_preset(args.name, args.output, workers=args.workers)
    for f in outcome.files:
        print(f"wrote {f}")
    print(f"{'PASS' if outcome.passed else 'FAIL'} {args.name}: {outcome.summary}")
    return EXIT_OK if outcome.passed else EXIT_ACCEPTANCE


def _cmd_verify(args):
    return EXIT_OK if verify_constants() else EXIT_ACCEPTANCE


def build_parser():
    parser = argparse.ArgumentParser(prog="eset", description="Space-time spectral Allen-Cahn solver.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log warnings and progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="march one configuration")
    p.add_argument("config", help="key = value file or a previously emitted CSV")
    p.add_argument("-o", "--output", help="output path prefix (overrides the config)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("preset", help="run a named experiment")
    p.add_argument("name", choices=sorted(PRESETS))
    p.add_argument("-o", "--output", help="output path prefix (default: the preset name)")
    p.add_argument("-j", "--workers", type=int, default=1, help="threads for independent runs")
    p.set_defaults(func=_cmd_preset)

    p = sub.add_parser("converge", help="time-step convergence study of a manufactured config")
    p.add_argument("config")
    p.add_argument("--taus", type=float, nargs="+", required=True, help="halving sequence of steps")
    p.add_argument("-o", "--output")
    p.add_argument("-j", "--workers", type=int, default=1)
    p.add_argument("--in-slab", action="store_true", help="also measure the L2-in-time error")
    p.add_argument("--expect-order", type=float, help="fail with exit 4 unless the order matches")
    p.add_argument("--order-tol", type=float, default=0.3)
    p.set_defaults(func=_cmd_converge)

    p = sub.add_parser("verify-constants", help="check the extension constants c_k and C_k")
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (MarchError, SolverError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
