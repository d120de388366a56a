"""Command-line front end.

Subcommands mirror the library: ``integrate``, ``area``, ``arclength``,
``volume``, ``order`` and ``verify``.  Output is a human table by default,
or a machine-readable JSON envelope ``{"request": ..., "result": ...,
"version": ...}`` with numbers printed to 17 significant digits; CSV is
available for the extraction tables of the geometric subcommands.

Exit status: 0 on success, 2 on parse/precondition errors, 3 when
refinement failed to converge (the best bracket is still emitted).  Every
error path writes one ``error: ...`` line to stderr.  The environment
variable ``AXIOQUAD_SEED`` overrides the default seed of 42.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace

from . import __version__
from .asymptotics import (
    DEFAULT_SCHEDULE,
    HSchedule,
    LimitEstimate,
    OrderFit,
    fit_order,
    is_little_o,
)
from .darboux import DEFAULT_EPS, DarbouxBracket, IntegralResult
from .errors import AxioquadError, NoConvergenceError, PreconditionError
from .expr import Function, evaluate, parse
from .geometry import GeometricResult, arclength, area_under_curve, volume_of_revolution_shells
from .integral import (
    AxiomReport,
    darboux_candidate,
    integrate,
    verify_additivity,
    verify_asymptotic,
)

DEFAULT_SEED = 42
# The verify subcommand integrates hundreds of random subintervals, so its
# default bracket budget is looser than the library default; the report
# tolerance is what certifies the result.
VERIFY_DEFAULT_EPS = 1e-4


# --------------------------------------------------------------------------
# Deterministic document emission
# --------------------------------------------------------------------------


def _fmt_float(v: float) -> str:
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    return "%.17g" % v


def _emit_json(value, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = []
        for k, v in value.items():
            items.append(f'{pad}  "{k}": {_emit_json(v, indent + 1)}')
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        flat = all(not isinstance(v, (dict, list, tuple)) for v in value)
        if flat and len(value) <= 4:
            return "[" + ", ".join(_emit_json(v) for v in value) + "]"
        items = [f"{pad}  {_emit_json(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, float):
        return _fmt_float(value)
    if isinstance(value, int):
        return str(value)
    escaped = (str(value).replace("\\", "\\\\").replace('"', '\\"')
               .replace("\n", "\\n").replace("\t", "\\t"))
    return f'"{escaped}"'


def _jsonable(obj):
    if isinstance(obj, IntegralResult):
        return {
            "value": obj.value,
            "error_bound": obj.error_bound,
            "method": obj.method,
            "evaluations": obj.evaluations,
            "bracket": _jsonable(obj.bracket) if obj.bracket is not None else None,
        }
    if isinstance(obj, DarbouxBracket):
        return {
            "lower": obj.lower,
            "upper": obj.upper,
            "partition_size": obj.partition_size,
            "samples_per_cell": obj.samples_per_cell,
            "width": obj.width,
        }
    if isinstance(obj, AxiomReport):
        trials = []
        for t in obj.trials:
            entry = {"site": list(t.site), "residual": t.residual}
            if t.error is not None:
                entry["error"] = t.error
            trials.append(entry)
        return {
            "axiom": obj.axiom,
            "tolerance": obj.tolerance,
            "seed": obj.seed,
            "pass": obj.passed,
            "max_residual": obj.max_residual,
            "trials": trials,
        }
    if isinstance(obj, LimitEstimate):
        return {
            "value": obj.value,
            "residual": obj.residual,
            "samples": [[h, g] for h, g in obj.samples],
            "converged": obj.converged,
            "noise_floor_hit": obj.noise_floor_hit,
        }
    if isinstance(obj, OrderFit):
        return {
            "slope": obj.slope,
            "intercept": obj.intercept,
            "r_squared": obj.r_squared,
            "window": list(obj.window),
            "zeros_dropped": obj.zeros_dropped,
            "exact_zero": obj.exact_zero,
        }
    if isinstance(obj, GeometricResult):
        return {
            "value": obj.value,
            "closed_form_integrand": obj.closed_form_integrand,
            "extracted_rho_samples": [[x, r] for x, r in obj.extracted_rho_samples],
            "oracle_value": obj.oracle_value,
            "method": obj.method,
            "extraction_tolerance": obj.extraction_tolerance,
        }
    return obj


def _fmt_table(v) -> str:
    if isinstance(v, float):
        if math.isnan(v) or math.isinf(v):
            return _fmt_float(v)
        return "%.12g" % v
    return str(v)


def _table_lines(doc, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(doc, dict):
        for key, value in doc.items():
            if isinstance(value, dict):
                lines.append(f"{pad}{key}:")
                lines.extend(_table_lines(value, indent + 1))
            elif isinstance(value, list) and value and isinstance(value[0], dict):
                lines.append(f"{pad}{key}: ({len(value)} entries, worst first)")
                ranked = sorted(value, key=lambda t: -t.get("residual", 0.0))
                for entry in ranked[:5]:
                    lines.extend(_table_lines(entry, indent + 1))
            elif isinstance(value, list) and value and isinstance(value[0], list):
                lines.append(f"{pad}{key}:")
                for pair in value:
                    lines.append(pad + "  " + "  ".join(_fmt_table(p) for p in pair))
            else:
                lines.append(f"{pad}{key}: {_fmt_table(value)}")
    else:
        lines.append(f"{pad}{doc}")
    return lines


def _print_document(request: dict, result: dict, fmt: str, csv_rows=None):
    if fmt == "json":
        envelope = {"request": request, "result": result, "version": __version__}
        print(_emit_json(envelope))
    elif fmt == "csv":
        if csv_rows is None:
            raise PreconditionError(
                "csv output is only available for area/arclength/volume extraction tables",
                field="format")
        print("x,rho_extracted,rho_closed_form,abs_err")
        for row in csv_rows:
            print(",".join(_fmt_float(v) for v in row))
    else:
        for line in _table_lines({"request": request, "result": result}):
            print(line)


# --------------------------------------------------------------------------
# Argument handling
# --------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _default_seed() -> int:
    env = os.environ.get("AXIOQUAD_SEED")
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise PreconditionError(
            f"AXIOQUAD_SEED must be an integer, got {env!r}", field="AXIOQUAD_SEED")


def _add_common(sub, with_interval=True):
    sub.add_argument("--f", required=True, help="integrand/function source, e.g. 'exp(-x^2)'")
    sub.add_argument("--df", help="optional derivative source")
    sub.add_argument("--F", help="optional antiderivative source (never inferred)")
    if with_interval:
        sub.add_argument("--a", type=float, required=True)
        sub.add_argument("--b", type=float, required=True)
    sub.add_argument("--eps", type=float, default=None,
                     help="bracket width target (default 1e-6; 1e-4 for verify)")
    sub.add_argument("--tol", type=float, default=None,
                     help="verification/limit tolerance")
    sub.add_argument("--format", choices=("table", "json", "csv"), default="table")
    sub.add_argument("--seed", type=int, default=None,
                     help="report seed (default 42, or AXIOQUAD_SEED)")
    sub.add_argument("--h0", type=float, default=DEFAULT_SCHEDULE.h0)
    sub.add_argument("--ratio", type=float, default=DEFAULT_SCHEDULE.ratio)
    sub.add_argument("--count", type=int, default=DEFAULT_SCHEDULE.count)
    sub.add_argument("--side", choices=("positive", "negative", "both"),
                     default=DEFAULT_SCHEDULE.side)


def _build_parser() -> _Parser:
    parser = _Parser(prog="axioquad",
                     description="Axiomatic definite integration toolkit")
    subparsers = parser.add_subparsers(dest="command", required=True)

    p = subparsers.add_parser("integrate", parents=[], help="definite integral of f over [a, b]")
    _add_common(p)

    p = subparsers.add_parser("area", help="area under a nonnegative curve")
    _add_common(p)

    p = subparsers.add_parser("arclength", help="curve length for C1 f")
    _add_common(p)

    p = subparsers.add_parser("volume", help="shell volume of revolution (0 <= a < b)")
    _add_common(p)

    p = subparsers.add_parser("order", help="asymptotic order of f(h) as h -> 0")
    _add_common(p, with_interval=False)
    p.add_argument("--n", type=int, default=None,
                   help="also decide membership in o(h^n)")

    p = subparsers.add_parser("verify", help="verify the two integral axioms for the "
                                             "bracket-built candidate of f")
    _add_common(p)
    p.add_argument("--axiom", choices=("additivity", "asymptotic", "both"), default="both")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--points", type=int, default=5)
    return parser


def _schedule_from(args) -> HSchedule:
    return HSchedule(h0=args.h0, ratio=args.ratio, count=args.count, side=args.side)


def _function_from(args, domain) -> Function:
    sources = (("--f", args.f), ("--df", args.df), ("--F", args.F))
    parsed = {}
    for flag, source in sources:
        if source is None:
            parsed[flag] = None
            continue
        try:
            parsed[flag] = parse(source)
        except AxioquadError as exc:
            raise PreconditionError(f"{flag}: {exc}", field=flag.lstrip("-")) from None
    return Function(body=parsed["--f"], domain=domain,
                    derivative=parsed["--df"], antiderivative=parsed["--F"])


def _request_echo(args, command: str, extra: dict | None = None) -> dict:
    request = {"subcommand": command, "f": args.f}
    if args.df:
        request["df"] = args.df
    if args.F:
        request["F"] = args.F
    if hasattr(args, "a"):
        request["a"] = args.a
        request["b"] = args.b
    if getattr(args, "eps", None) is not None:
        request["eps"] = args.eps
    if getattr(args, "tol", None) is not None:
        request["tol"] = args.tol
    request["schedule"] = {"h0": args.h0, "ratio": args.ratio,
                           "count": args.count, "side": args.side}
    request["format"] = args.format
    if extra:
        request.update(extra)
    return request


def _geometry_csv(result: GeometricResult, integrand_source: str):
    integrand = parse(integrand_source)
    rows = []
    for x, rho in result.extracted_rho_samples:
        closed = evaluate(integrand, x)
        rows.append((x, rho, closed, abs(rho - closed)))
    return rows


def _require_ordered_interval(args, need_nonneg_a=False):
    if not args.a < args.b:
        raise PreconditionError(f"need a < b, got a={args.a}, b={args.b}", field="a")
    if need_nonneg_a and args.a < 0:
        raise PreconditionError(f"need a >= 0, got a={args.a}", field="a")


def _cmd_integrate(args) -> int:
    eps = args.eps if args.eps is not None else DEFAULT_EPS
    lo, hi = min(args.a, args.b), max(args.a, args.b)
    if lo == hi:
        domain = (lo - 0.5, hi + 0.5)
    else:
        domain = (lo, hi)
    f = _function_from(args, domain)
    request = _request_echo(args, "integrate")
    request.setdefault("eps", eps)
    try:
        result = integrate(f, args.a, args.b, eps)
    except NoConvergenceError as exc:
        doc = {"error": str(exc),
               "best_bracket": _jsonable(exc.bracket) if exc.bracket else None,
               "evaluations": exc.evaluations}
        _print_document(request, doc, args.format if args.format != "csv" else "table")
        print(f"error: {exc}", file=sys.stderr)
        return 3
    _print_document(request, _jsonable(result), args.format)
    return 0


def _cmd_geometry(args, command: str) -> int:
    _require_ordered_interval(args, need_nonneg_a=(command == "volume"))
    eps = args.eps if args.eps is not None else DEFAULT_EPS
    f = _function_from(args, (args.a, args.b))
    request = _request_echo(args, command)
    request.setdefault("eps", eps)
    op = {"area": area_under_curve, "arclength": arclength,
          "volume": volume_of_revolution_shells}[command]
    try:
        result = op(f, args.a, args.b, eps)
    except NoConvergenceError as exc:
        doc = {"error": str(exc),
               "best_bracket": _jsonable(exc.bracket) if exc.bracket else None}
        _print_document(request, doc, args.format if args.format != "csv" else "table")
        print(f"error: {exc}", file=sys.stderr)
        return 3
    csv_rows = _geometry_csv(result, result.closed_form_integrand)
    _print_document(request, _jsonable(result), args.format, csv_rows=csv_rows)
    return 0


def _cmd_order(args) -> int:
    schedule = _schedule_from(args)
    try:
        g_expr = parse(args.f)
    except AxioquadError as exc:
        raise PreconditionError(f"--f: {exc}", field="f") from None

    def g(h):
        return evaluate(g_expr, h)

    request = _request_echo(args, "order",
                            extra={} if args.n is None else {"n": args.n})
    fit = fit_order(g, schedule)
    result = {"order_fit": _jsonable(fit)}
    if args.n is not None:
        tol = args.tol if args.tol is not None else 1e-6
        decision = is_little_o(g, args.n, schedule, tol)
        result["little_o"] = {"n": args.n, "verdict": decision.verdict,
                              "evidence": _jsonable(decision.evidence)}
    _print_document(request, result, args.format)
    return 0


def _cmd_verify(args) -> int:
    _require_ordered_interval(args)
    eps = args.eps if args.eps is not None else VERIFY_DEFAULT_EPS
    tol_additivity = args.tol if args.tol is not None else 1e-5
    tol_asymptotic = args.tol if args.tol is not None else 1e-4
    seed = args.seed if args.seed is not None else _default_seed()
    schedule = _schedule_from(args)
    f = _function_from(args, (args.a, args.b))
    candidate = darboux_candidate(f, eps)
    request = _request_echo(args, "verify",
                            extra={"axiom": args.axiom, "trials": args.trials,
                                   "points": args.points, "seed": seed})
    request.setdefault("eps", eps)
    result = {}
    all_passed = True
    if args.axiom in ("additivity", "both"):
        report = verify_additivity(candidate, args.a, args.b,
                                   trials=args.trials, seed=seed, tol=tol_additivity)
        result["additivity"] = _jsonable(report)
        all_passed &= report.passed
    if args.axiom in ("asymptotic", "both"):
        span = args.b - args.a
        points = [args.a + k * span / (args.points + 1) for k in range(1, args.points + 1)]
        report = verify_asymptotic(candidate, f, points, schedule, tol_asymptotic)
        result["asymptotic"] = _jsonable(report)
        all_passed &= report.passed
    result["pass"] = all_passed
    _print_document(request, result, args.format)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "integrate":
            return _cmd_integrate(args)
        if args.command in ("area", "arclength", "volume"):
            return _cmd_geometry(args, args.command)
        if args.command == "order":
            return _cmd_order(args)
        if args.command == "verify":
            return _cmd_verify(args)
        raise PreconditionError(f"unknown command {args.command!r}", field="command")
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 0
        return code
    except NoConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except AxioquadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # never panic on user input
        print(f"error: internal: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
