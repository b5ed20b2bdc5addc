"""Command-line entry point: ``tgv <verb> [--flag value]...``.

Exit codes: 0 success, 1 runtime or verification failure, 2 usage error.
"""

import argparse
import logging
import sys

import numpy as np
from threadpoolctl import threadpool_limits

from . import bench as bench_mod
from . import verify as verify_mod
from .errors import ArgumentError
from .evaluate import EvalConfig, TgvParams, eval_tgv_compact, eval_tgv_direct
from .pgm import read_pgm, write_pgm
from .solver import ForwardOp, SolverConfig, default_alphas, restore

__all__ = ["main", "build_parser", "parse_alphas", "parse_kernel"]

log = logging.getLogger("tgv")


class UsageError(Exception):
    pass


def parse_alphas(text, order):
    """Comma-separated ``alpha_0,...,alpha_{n-1}``; a single value ``a`` expands
    to :func:`~tgv.solver.default_alphas`."""
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"--alpha: cannot parse {text!r}") from None
    if order < 1:
        raise UsageError(f"--order must be >= 1, got {order}")
    if len(values) == 1 and order != 1:
        return default_alphas(order, values[0])
    if len(values) != order:
        raise UsageError(f"--alpha: order {order} needs {order} values, got {len(values)}")
    return tuple(values)


def parse_kernel(text):
    """Rows separated by ``;``, entries by ``,``: ``"0,1,0;1,4,1;0,1,0"``."""
    try:
        rows = [[float(v) for v in row.split(",")] for row in text.split(";")]
    except ValueError:
        raise UsageError(f"--kernel: cannot parse {text!r}") from None
    if len({len(r) for r in rows}) != 1:
        raise UsageError("--kernel: rows have different lengths")
    return np.array(rows)


def _params(args):
    alphas = parse_alphas(args.alpha, args.order)
    try:
        return TgvParams(args.order, alphas)
    except ArgumentError as exc:
        raise UsageError(str(exc)) from None


def _fmt(x):
    return f"{x:.17g}"


def _header(verb, args, names):
    parts = [f"{n}={getattr(args, n)}" for n in names]
    return f"# tgv {verb} " + " ".join(parts)


def _add_common(p, seed=True):
    if seed:
        p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)


def build_parser():
    parser = argparse.ArgumentParser(prog="tgv", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("eval", help="evaluate TGV of an image")
    p.add_argument("--input", required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--form", choices=("compact", "direct", "both"), default="compact")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iters", type=int, default=20000)
    _add_common(p)

    p = sub.add_parser("verify", help="run the operator identity checks")
    p.add_argument("--max-order", type=int, default=4)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    _add_common(p)

    p = sub.add_parser("bench", help="compare compact and direct forms")
    p.add_argument("--orders", default="1-8", help="e.g. '1-8' or '2,3,5'")
    p.add_argument("--size", type=int, default=128)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--check", action="store_true",
                   help="exit 1 unless width ratios are exact and time ratios increase")
    _add_common(p)

    for verb in ("denoise", "deblur"):
        p = sub.add_parser(verb, help=f"{verb} a PGM image with TGV")
        p.add_argument("--input", required=True)
        p.add_argument("--output", required=True)
        p.add_argument("--order", type=int, default=2)
        p.add_argument("--alpha", default="1")
        p.add_argument("--data-weight", type=float, required=True)
        p.add_argument("--max-iters", type=int, default=10000)
        p.add_argument("--tol", type=float, default=1e-7)
        p.add_argument("--maxval", type=int, default=255)
        p.add_argument("--trace", help="write an iteration,objective CSV here")
        p.add_argument("--log-every", type=int, default=0)
        if verb == "deblur":
            p.add_argument("--kernel", default="1,1,1;1,1,1;1,1,1",
                           help="stencil rows; normalized to unit sum")
        _add_common(p)
    return parser


def _parse_orders(text):
    try:
        if "-" in text:
            lo, hi = (int(v) for v in text.split("-"))
            return list(range(lo, hi + 1))
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"--orders: cannot parse {text!r}") from None


def cmd_eval(args, out):
    params = _params(args)
    g = read_pgm(args.input)
    cfg = EvalConfig(tol=args.tol, max_iters=args.max_iters, seed=args.seed)
    print(_header("eval", args, ["input", "order", "alpha", "form", "tol", "max_iters",
                                 "seed", "threads"]), file=out)
    print(f"# alphas={','.join(_fmt(a) for a in params.alphas)}", file=out)
    results = {}
    forms = ("compact", "direct") if args.form == "both" else (args.form,)
    for form in forms:
        fn = eval_tgv_compact if form == "compact" else eval_tgv_direct
        res = fn(g, params, cfg)
        results[form] = res
        print(f"{form}: value={_fmt(res.value)} iterations={res.iterations} "
              f"residual={_fmt(res.residual)} converged={res.converged}", file=out)
    if args.form == "both":
        c, d = results["compact"].value, results["direct"].value
        diff = abs(d - c) / abs(c) if c != 0 else abs(d - c)
        print(f"relative_difference={_fmt(diff)}", file=out)
    return 0


def cmd_verify(args, out):
    print(_header("verify", args, ["seed", "max_order", "trials", "threads"]), file=out)
    if args.inject_fault:
        with verify_mod.inject_scaling_fault():
            checks = verify_mod.run_checks(args.seed, args.max_order, args.trials)
    else:
        checks = verify_mod.run_checks(args.seed, args.max_order, args.trials)
    width = max(len(c.name) for c in checks)
    print(f"{'check':<{width}}  {'max_error':>24}  {'tolerance':>9}  result", file=out)
    for c in checks:
        print(f"{c.name:<{width}}  {_fmt(c.max_error):>24}  {c.tolerance:>9.0e}  "
              f"{'PASS' if c.passed else 'FAIL'}", file=out)
    failed = [c.name for c in checks if not c.passed]
    if failed:
        print("FAILED: " + "; ".join(failed), file=out)
        return 1
    print(f"all {len(checks)} checks passed", file=out)
    return 0


def cmd_bench(args, out):
    orders = _parse_orders(args.orders)
    rows = bench_mod.run_bench(orders, size=args.size, repeats=args.repeats, seed=args.seed)
    print(_header("bench", args, ["orders", "size", "repeats", "seed", "threads"]), file=out)
    print("order compact_width direct_width width_ratio compact_bytes direct_bytes "
          "compact_s direct_s time_ratio", file=out)
    for r in rows:
        direct = ("skipped", "skipped") if r.skipped else (
            f"{r.direct_seconds:.6f}", f"{r.time_ratio:.3f}")
        print(f"{r.order} {r.compact_width} {r.direct_width} {r.width_ratio:.6g} "
              f"{r.compact_bytes} {r.direct_bytes} {r.compact_seconds:.6f} "
              f"{direct[0]} {direct[1]}", file=out)
    if args.check:
        widths_ok = all(r.direct_width * r.order == r.compact_width * 2 ** (r.order - 1)
                        for r in rows)
        times_ok = bench_mod.time_ratios_increasing(rows)
        print(f"width ratios exact: {widths_ok}", file=out)
        print(f"time ratios increasing: {times_ok}", file=out)
        return 0 if widths_ok and times_ok else 1
    return 0


def cmd_restore(args, out):
    params = _params(args)
    f = read_pgm(args.input)
    if args.verb == "deblur":
        kernel = parse_kernel(args.kernel)
        total = kernel.sum()
        K = ForwardOp.convolution(kernel / total if total != 0 else kernel)
    else:
        K = ForwardOp.identity()
    try:
        cfg = SolverConfig(data_weight=args.data_weight, max_iters=args.max_iters,
                           tol=args.tol, seed=args.seed, log_every=args.log_every)
    except ArgumentError as exc:
        raise UsageError(str(exc)) from None
    res = restore(f, K, params, cfg)
    write_pgm(args.output, res.image, maxval=args.maxval)
    if args.trace:
        with open(args.trace, "w", newline="") as fh:
            fh.write("iteration,objective\n")
            for it, obj in res.objective_trace:
                fh.write(f"{it},{_fmt(obj)}\n")
    names = ["input", "output", "order", "alpha", "data_weight", "max_iters", "tol",
             "seed", "threads"]
    print(_header(args.verb, args, names), file=out)
    print(f"objective={_fmt(res.objective)} initial={_fmt(res.initial_objective)} "
          f"iterations={res.iterations} converged={res.converged}", file=out)
    return 0


_COMMANDS = {"eval": cmd_eval, "verify": cmd_verify, "bench": cmd_bench,
             "denoise": cmd_restore, "deblur": cmd_restore}


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.INFO, stream=sys.stderr,
                            format="%(name)s: %(message)s")
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        with threadpool_limits(limits=args.threads):
            return _COMMANDS[args.verb](args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"tgv: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"tgv: {exc}", file=sys.stderr)
        return 1


def entry():
    sys.exit(main())
