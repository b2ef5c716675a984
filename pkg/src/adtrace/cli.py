"""``adtrace`` command-line front end.

Exit codes: 0 success, 2 usage or parse error, 3 domain error, 4 failed
derivative check. Diagnostics go to stderr; stdout only carries results, so
identical invocations print identical bytes.

The CLI always runs the pure-Python kernels. Programs typed on a command line
are small, and this keeps start-up free of JIT compilation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import kernels
from .baselines import FdConfig, fd_jacobian, swell_rows
from .errors import DimensionError, DomainError, ParseError
from .forward import jacobian_forward
from .lang.parser import parse
from .lang.tracer import program_function
from .nested import HvpRequest, hvp
from .optimize import GdConfig, NewtonConfig, gradient_descent, newton_cg
from .printing import format_adjoint_trace, format_forward_trace
from .reverse import jacobian_reverse
from .tape import evaluate_arrays, export_dot

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_CHECK = 0, 2, 3, 4
CHECK_TOLERANCE = 1e-4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# argument helpers -----------------------------------------------------------

def _source_of(args) -> str:
    if args.expr is not None and args.file is not None:
        raise UsageError("give either -e or -f, not both")
    if args.expr is not None:
        return args.expr
    if args.file is not None:
        try:
            with open(args.file, encoding="utf-8") as fh:
                return fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
    raise UsageError("an expression is required (-e EXPR or -f FILE)")


def _number(text: str, what: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise UsageError(f"{what}: {text!r} is not a number") from None
    if not math.isfinite(value):
        raise UsageError(f"{what}: value must be finite")
    return value


def parse_bindings(specs: Sequence[str] | None) -> dict:
    """``["x1=2,x2=5", "x3=1"]`` -> ``{"x1": 2.0, "x2": 5.0, "x3": 1.0}``."""
    out = {}
    for spec in specs or ():
        for item in spec.split(","):
            item = item.strip()
            if not item:
                continue
            name, sep, value = item.partition("=")
            name = name.strip()
            if not sep or not name:
                raise UsageError(f"bad binding {item!r}; expected name=value")
            if name in out:
                raise UsageError(f"parameter {name!r} bound twice")
            out[name] = _number(value.strip(), f"binding for {name}")
    return out


def _point(params, bindings, flag="--at"):
    unknown = [k for k in bindings if k not in params]
    if unknown:
        raise UsageError(f"unknown parameter {unknown[0]!r} (parameters: {', '.join(params) or 'none'})")
    missing = [p for p in params if p not in bindings]
    if missing:
        raise UsageError(f"unbound parameter {missing[0]!r}; bind it with {flag} {missing[0]}=VALUE")
    return [bindings[p] for p in params]


def _vector(spec: str, params) -> list:
    """Direction given positionally (``1,2``) or by name (``x1=1,x2=2``)."""
    if "=" in spec:
        return _point(params, parse_bindings([spec]), "--vector")
    items = [s for s in spec.split(",") if s.strip()]
    values = [_number(s.strip(), "--vector") for s in items]
    if len(values) != len(params):
        raise DimensionError(f"--vector has {len(values)} entries but the function has {len(params)} parameters")
    return values


def _fmt(x: float, precision: int) -> str:
    return f"{float(x) + 0.0:.{precision}f}"


def _emit_json(obj):
    print(json.dumps(obj, separators=(",", ":"), allow_nan=False))


def _names_line(prefix, params, values, precision):
    if not params:
        return "(no parameters)"
    return " ".join(f"{prefix}{p}={_fmt(v, precision)}" for p, v in zip(params, values))


def _load(args):
    prog = parse(_source_of(args))
    return prog, program_function(prog)


def _require_scalar(tape, what):
    if tape.num_outputs != 1:
        raise DimensionError(f"{what} needs a single-output function; this one has {tape.num_outputs} (try jacobian)")


# subcommands --------------------------------------------------------------

def cmd_eval(args):
    prog, f = _load(args)
    x = _point(f.params, parse_bindings(args.at))
    tape = f.trace(x)
    outputs = evaluate_arrays(tape, x, kernels.python).outputs.tolist()
    if args.json:
        _emit_json({"params": dict(zip(f.params, x)), "outputs": outputs})
        return EXIT_OK
    if args.trace:
        sys.stdout.write(format_forward_trace(tape, x, precision=args.precision))
        return EXIT_OK
    for y in outputs:
        print(_fmt(y, args.precision))
    return EXIT_OK


def cmd_grad(args):
    prog, f = _load(args)
    x = _point(f.params, parse_bindings(args.at))
    tape = f.trace(x)
    _require_scalar(tape, "grad")
    if args.mode == "reverse":
        g = jacobian_reverse(tape, x, kernels.python)[0].tolist()
    else:
        g = jacobian_forward(tape, x, kernels.python)[0].tolist()
    if args.json:
        _emit_json({"gradient": dict(zip(f.params, g))})
        return EXIT_OK
    if args.trace:
        if args.mode == "reverse":
            sys.stdout.write(format_adjoint_trace(tape, x, precision=args.precision))
        else:
            for i in range(len(x)):
                seed = [0.0] * len(x)
                seed[i] = 1.0
                if i:
                    print()
                print(f"# seed d{f.params[i]} = 1")
                sys.stdout.write(format_forward_trace(tape, x, seed, precision=args.precision))
        print()
    print(_names_line("d", f.params, g, args.precision))
    return EXIT_OK


def cmd_jacobian(args):
    prog, f = _load(args)
    x = _point(f.params, parse_bindings(args.at))
    tape = f.trace(x)
    engine = jacobian_reverse if args.mode == "reverse" else jacobian_forward
    jac = engine(tape, x, kernels.python)
    if args.json:
        _emit_json({"params": list(f.params), "jacobian": jac.tolist()})
        return EXIT_OK
    for j, row in enumerate(jac):
        name = "y" if len(jac) == 1 else f"y{j + 1}"
        print(f"{name}: {_names_line('d', f.params, row, args.precision)}")
    return EXIT_OK


def cmd_hvp(args):
    prog, f = _load(args)
    x = _point(f.params, parse_bindings(args.at))
    if args.vector is None:
        raise UsageError("hvp needs --vector")
    v = _vector(args.vector, f.params)
    tape = f.trace(x)
    _require_scalar(tape, "hvp")
    hv = hvp(tape, HvpRequest(x, v))
    if args.json:
        _emit_json({"hvp": dict(zip(f.params, hv))})
        return EXIT_OK
    print(_names_line("", f.params, hv, args.precision))
    return EXIT_OK


def _relative_errors(ad, fd):
    # scaled by max(1, |ad|, |fd|) so that zero and tiny entries compare absolutely
    scale = np.maximum(1.0, np.maximum(np.abs(ad), np.abs(fd)))
    return np.abs(ad - fd) / scale


def cmd_check(args):
    prog, f = _load(args)
    x = _point(f.params, parse_bindings(args.at))
    tape = f.trace(x)
    ad = jacobian_reverse(tape, x, kernels.python)
    step = "auto" if args.fd_step is None else args.fd_step
    try:
        config = FdConfig(step=step)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    fd = fd_jacobian(f, x, config)
    err = _relative_errors(ad, fd)
    worst = float(err.max()) if err.size else 0.0
    ok = worst < CHECK_TOLERANCE
    if args.json:
        _emit_json({
            "params": list(f.params),
            "ad": ad.tolist(),
            "fd": fd.tolist(),
            "max_rel_error": worst,
            "tolerance": CHECK_TOLERANCE,
            "ok": ok,
        })
    else:
        for j in range(ad.shape[0]):
            tag = "" if ad.shape[0] == 1 else f"[y{j + 1}] "
            print(f"{tag}AD: {_names_line('d', f.params, ad[j], args.precision)}")
            print(f"{tag}FD: {_names_line('d', f.params, fd[j], args.precision)}")
        print(f"max relative error: {worst:.3e} ({'ok' if ok else 'FAIL'}, tolerance {CHECK_TOLERANCE:g})")
    return EXIT_OK if ok else EXIT_CHECK


def cmd_graph(args):
    prog, f = _load(args)
    bindings = parse_bindings(args.at)
    if not args.at:
        # the graph of a branch-free program does not depend on the point
        bindings = {p: 1.0 for p in f.params}
    x = _point(f.params, bindings)
    sys.stdout.write(export_dot(f.trace(x)))
    return EXIT_OK


def cmd_swell(args):
    if args.depth < 2:
        raise UsageError("--depth must be at least 2")
    rows = swell_rows(args.depth, simplify=args.simplify)
    if args.json:
        keys = ("k", "expr_size", "derivative_size", "tape_size")
        _emit_json({"simplify": args.simplify, "rows": [dict(zip(keys, r)) for r in rows]})
        return EXIT_OK
    print(f"{'k':>3} {'expr':>6} {'d/dx':>8} {'tape':>6}")
    for k, e, d, t in rows:
        print(f"{k:>3} {e:>6} {d:>8} {t:>6}")
    return EXIT_OK


def cmd_opt(args):
    prog, f = _load(args)
    w0 = _point(f.params, parse_bindings(args.w0), "--w0")
    if f.trace(w0).num_outputs != 1:
        raise DimensionError("opt needs a single-output function")
    try:
        if args.method == "gd":
            config = GdConfig(step=args.eta, max_iters=args.max_iters, grad_tol=args.tol)
            traj = gradient_descent(f, w0, config)
        else:
            config = NewtonConfig(max_iters=args.max_iters, grad_tol=args.tol)
            traj = newton_cg(f, w0, config)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.json:
        last = traj.final
        _emit_json({
            "method": args.method,
            "termination": traj.termination,
            "iterations": len(traj.iterates) - 1,
            "final": {"w": dict(zip(f.params, last.w)), "f": last.f, "grad_inf_norm": last.grad_inf},
            "gradient_calls": traj.gradient_calls,
            "hvp_calls": traj.hvp_calls,
        })
    else:
        sys.stdout.write(traj.to_csv(f.params))
    print(f"{args.method}: {traj.termination} after {len(traj.iterates) - 1} iterations"
          + (f" ({traj.message})" if traj.message else ""), file=sys.stderr)
    return EXIT_DOMAIN if traj.termination == "domain-error" else EXIT_OK


# parser -------------------------------------------------------------------

def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _nonneg_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if not 0 <= value <= 17:
        raise argparse.ArgumentTypeError("must be between 0 and 17")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="adtrace", description="Forward and reverse automatic differentiation of small programs.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def source(p):
        p.add_argument("-e", "--expr", help="program or expression text")
        p.add_argument("-f", "--file", help="read the program from a file")

    def common(p, at=True, json_=True, precision=True):
        source(p)
        if at:
            p.add_argument("--at", action="append", metavar="NAME=V,...", help="parameter values, e.g. x1=2,x2=5")
        if json_:
            p.add_argument("--json", action="store_true", help="machine-readable output at full precision")
        if precision:
            p.add_argument("--precision", type=_nonneg_int, default=4, metavar="K", help="decimals shown (default 4)")

    p = sub.add_parser("eval", help="evaluate the program")
    common(p)
    p.add_argument("--trace", action="store_true", help="print the evaluation trace")
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("grad", help="gradient of a scalar program")
    common(p)
    p.add_argument("--mode", choices=("forward", "reverse"), default="reverse")
    p.add_argument("--trace", action="store_true", help="print the tangent or adjoint trace")
    p.set_defaults(run=cmd_grad)

    p = sub.add_parser("jacobian", help="full Jacobian")
    common(p)
    p.add_argument("--mode", choices=("forward", "reverse"), default="reverse")
    p.set_defaults(run=cmd_jacobian)

    p = sub.add_parser("hvp", help="Hessian-vector product (forward over reverse)")
    common(p)
    p.add_argument("--vector", metavar="V", help="direction, e.g. 1,0 or x1=1,x2=0")
    p.set_defaults(run=cmd_hvp)

    p = sub.add_parser("check", help="compare the AD gradient against central differences")
    common(p)
    p.add_argument("--fd-step", type=float, metavar="H", help="finite-difference step (default: automatic)")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("graph", help="computational graph as Graphviz DOT")
    common(p, json_=False, precision=False)
    p.set_defaults(run=cmd_graph)

    p = sub.add_parser("swell", help="symbolic derivative size vs tape size on product chains")
    p.add_argument("--depth", type=_positive_int, default=10, help="largest chain length k (default 10)")
    p.add_argument("--simplify", action="store_true", help="apply the extra simplification rules")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_swell)

    p = sub.add_parser("opt", help="minimize a scalar program; CSV trajectory on stdout")
    common(p, at=False, precision=False)
    p.add_argument("--w0", action="append", metavar="NAME=V,...", help="starting point")
    p.add_argument("--method", choices=("gd", "newton-cg"), default="gd")
    p.add_argument("--eta", type=float, default=0.1, help="gradient-descent step (default 0.1)")
    p.add_argument("--max-iters", type=_positive_int, default=1000)
    p.add_argument("--tol", type=float, default=1e-8, help="stop when max |grad| is below this")
    p.set_defaults(run=cmd_opt)
    return parser


def _show_parse_error(exc: ParseError, source: str | None):
    print(f"adtrace: {exc}", file=sys.stderr)
    if source is None or exc.span is None:
        return
    start = exc.span.start
    if start >= len(source.rstrip()):
        # errors at end of input point just past the last visible character
        start = len(source.rstrip())
    line_start = source.rfind("\n", 0, start) + 1
    line_end = source.find("\n", start)
    line = source[line_start: None if line_end < 0 else line_end]
    width = max(1, min(exc.span.end, len(source)) - start)
    print("  " + line, file=sys.stderr)
    print("  " + " " * (start - line_start) + "^" * min(width, max(1, len(line) - (start - line_start))), file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    saved = kernels.active
    kernels.active = kernels.python
    try:
        return _main(argv)
    finally:
        kernels.active = saved


def _main(argv):
    parser = build_parser()
    args = None
    try:
        args = parser.parse_args(argv)
        return args.run(args)
    except UsageError as exc:
        print(f"adtrace: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        source = getattr(args, "expr", None)
        if source is None and getattr(args, "file", None):
            try:
                with open(args.file, encoding="utf-8") as fh:
                    source = fh.read()
            except OSError:
                source = None
        _show_parse_error(exc, source)
        return EXIT_USAGE
    except DimensionError as exc:
        print(f"adtrace: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"adtrace: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()


def load_schema(command: str) -> dict:
    """JSON schema for ``adtrace COMMAND --json`` output."""
    from importlib import resources

    return json.loads(resources.files("adtrace").joinpath("schemas", f"{command}.json").read_text("utf-8"))
