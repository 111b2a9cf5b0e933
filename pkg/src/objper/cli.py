"""Command-line interface: ``objper {scan,component,ic-path,simulate}``.

Exit codes: 0 success, 2 invalid input or usage, 3 numerical failure. On
failure a single JSON object ``{"error": {...}}`` is written to standard
error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .component import extract_component
from .errors import ConvergenceError, InputError, NumericalError, ObjperError, ParseError, ValidationError
from .formats import SCHEMA_VERSION, build_result, component_payload, parse_series, tool_info, write_json
from .scan import scan
from .simulation import FAMILIES, make_config, run_monte_carlo
from .tuning import select

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 2, 3
SPACE_CHOICES = ("sphere-composition", "sphere", "laplacian", "wasserstein1d", "euclidean")
TABLE_T = (100, 240, 500)
TABLE_ALPHA = (1.0, 0.5, 0.1)
FAST_REPS = 50


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"usage: {message}")


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0 or v == float("inf"):
        raise argparse.ArgumentTypeError(f"must be a positive finite number, got {text}")
    return v


def _multipliers(text):
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad multiplier list {text!r}") from None
    if not vals or any(not v >= 0 for v in vals):
        raise argparse.ArgumentTypeError("multipliers must be a comma-separated list of numbers >= 0")
    return vals


def _add_selection(p):
    p.add_argument("--theta-max", type=int, help="largest candidate period (default round(4 sqrt T))")
    p.add_argument("--criterion", choices=("rss", "log-rss"), default="rss")
    p.add_argument("--g-override", type=_positive_float, metavar="G",
                   help="per-period penalty of the information criterion (default log(T/Θ)/(T/Θ)^1.01)")


def _add_input(p):
    p.add_argument("--input", required=True, help="series file")
    p.add_argument("--space", required=True, choices=SPACE_CHOICES,
                   help="declared file kind; sphere-composition rows are simplex vectors")
    p.add_argument("--output", help="result file (default: standard output)")


def build_parser():
    parser = _Parser(prog="objper", description="Period estimation for time series of metric-space objects.")
    parser.add_argument("--version", action="version", version=f"objper {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("scan", help="scan candidate periods, select one and extract the component")
    _add_input(p)
    _add_selection(p)
    p.add_argument("--lambda-multipliers", type=_multipliers, default=[1.0], metavar="M1,M2,...",
                   help="emit penalized-loss curves at these multiples of the selected lambda")

    p = sub.add_parser("ic-path", help="lambda path and information criterion per path segment")
    _add_input(p)
    _add_selection(p)
    p.add_argument("--lambda-multipliers", type=_multipliers, default=[1.0], metavar="M1,M2,...")

    p = sub.add_parser("component", help="periodic component for a given or selected period")
    _add_input(p)
    _add_selection(p)
    p.add_argument("--period", type=int, help="use this period instead of selecting one")

    p = sub.add_parser("simulate", help="seeded Monte Carlo study of a generator family")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("--T", "-T", dest="T", type=int, default=240)
    p.add_argument("--alpha", type=_positive_float, default=1.0, help="Dirichlet concentration")
    p.add_argument("--theta0", type=int, default=12)
    p.add_argument("--p", dest="p", type=int, default=10, help="network node count")
    p.add_argument("--M", dest="M", type=int, default=100, help="quantile grid size")
    p.add_argument("--amplitude", type=float, help="periodic amplitude (network, distribution)")
    p.add_argument("--noise", type=float, help="noise scale (network, distribution)")
    p.add_argument("--noiseless", action="store_true", help="disable noise")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--fast", action="store_true", help=f"use {FAST_REPS} replicates")
    _add_selection(p)
    p.add_argument("--table", choices=("period", "mse"), help="print a summary table over T (and alpha)")
    p.add_argument("--timing", action="store_true", help="include wall-clock statistics")
    p.add_argument("--output", help="report file (default: standard output)")
    return parser


# -- commands ----------------------------------------------------------------


def _selection_config(args):
    return {
        "input": args.input,
        "space": args.space,
        "theta_max": args.theta_max,
        "criterion": args.criterion,
        "g_override": args.g_override,
    }


def _analyse(args):
    series = parse_series(args.input, args.space)
    result = scan(series, args.theta_max)
    report = select(result, args.criterion, args.g_override)
    return series, result, report


def cmd_scan(args):
    series, result, report = _analyse(args)
    comp = extract_component(series, report.selected_theta, result)
    cfg = _selection_config(args) | {"lambda_multipliers": args.lambda_multipliers}
    write_json(args.output, build_result("scan", cfg, series, result, report, comp, args.lambda_multipliers))


def cmd_ic_path(args):
    series, result, report = _analyse(args)
    cfg = _selection_config(args) | {"lambda_multipliers": args.lambda_multipliers}
    write_json(args.output, build_result("ic-path", cfg, series, result, report, None, args.lambda_multipliers))


def cmd_component(args):
    series = parse_series(args.input, args.space)
    doc = {"schema_version": SCHEMA_VERSION, "tool": tool_info(), "command": "component",
           "config": _selection_config(args) | {"period": args.period},
           "space": {"kind": series.space.kind, "point_shape": list(series.space.point_shape)},
           "T": series.T}
    if args.period is None:
        result = scan(series, args.theta_max)
        report = select(result, args.criterion, args.g_override)
        comp = extract_component(series, report.selected_theta, result)
        doc["selected_by"] = "information-criterion"
    else:
        comp = extract_component(series, args.period)
        doc["selected_by"] = "user"
    doc["component"] = component_payload(comp)
    write_json(args.output, doc)


def _sim_config(args, **override):
    kw = {"T": args.T, "theta0": args.theta0, "seed": args.seed}
    if args.family == "dirichlet":
        kw.update(alpha=args.alpha, noise=not args.noiseless)
    else:
        kw.update({"network": {"p": args.p}, "distribution": {"M": args.M}}[args.family])
        if args.amplitude is not None:
            kw["amplitude"] = args.amplitude
        if args.noise is not None:
            kw["noise"] = args.noise
        if args.noiseless:
            kw["noise"] = 0.0
    kw.update(override)
    return make_config(args.family, **kw)


def _table_grid(args):
    if args.family == "dirichlet":
        return [(T, a) for a in TABLE_ALPHA for T in TABLE_T]
    return [(T, None) for T in TABLE_T]


def _fmt(x):
    return "   nan" if x is None else f"{x:6.3f}"


def format_table(kind, family, reports):
    """Text table: hit rates by T (rows alpha) or component MSE (rows T, columns alpha)."""
    by = {(r.config["T"], r.config.get("alpha")): r for r in reports}
    lines = []
    if kind == "period":
        w, th = reports[0].window, reports[0].theta0
        head = " ".join(f"{'T=' + str(T):>6s}" for T in TABLE_T)
        lines.append(f"{'':10s} | {'p(theta=' + str(th) + ')':{len(head)}s} | p({w[0]}<=theta<={w[1]})")
        lines.append(f"{'':10s} | {head} | {head}")
        for a in TABLE_ALPHA if family == "dirichlet" else (None,):
            label = f"alpha={a:g}" if a is not None else family
            exact = " ".join(_fmt(by[(T, a)].p_exact) for T in TABLE_T)
            win = " ".join(_fmt(by[(T, a)].p_window) for T in TABLE_T)
            lines.append(f"{label:10s} | {exact} | {win}")
    else:
        cols = TABLE_ALPHA if family == "dirichlet" else (None,)
        lines.append(f"{'':8s} | " + " ".join(f"{('alpha=' + format(a, 'g')) if a else family:>10s}" for a in cols))
        for T in TABLE_T:
            lines.append(f"{'T=' + str(T):8s} | " + " ".join(f"{_fmt(by[(T, a)].mse_mean):>10s}" for a in cols))
    return "\n".join(lines) + "\n"


def cmd_simulate(args):
    reps = FAST_REPS if args.fast else args.reps
    opts = dict(kind=args.criterion, g=args.g_override, theta_max=args.theta_max, timing=args.timing)
    if args.table:
        if args.theta_max is not None:
            raise InputError("--theta-max cannot be combined with --table (T varies)")
        reports = []
        for T, a in _table_grid(args):
            cfg = _sim_config(args, T=T, **({"alpha": a} if a is not None else {}))
            reports.append(run_monte_carlo(cfg, reps, **opts))
        sys.stdout.write(format_table(args.table, args.family, reports))
    else:
        reports = [run_monte_carlo(_sim_config(args), reps, **opts)]
    doc = {"schema_version": SCHEMA_VERSION, "tool": tool_info(), "command": "simulate",
           "table": args.table, "reports": [r.to_dict() for r in reports]}
    if args.table is None or args.output:
        write_json(args.output, doc)


COMMANDS = {"scan": cmd_scan, "ic-path": cmd_ic_path, "component": cmd_component, "simulate": cmd_simulate}


def error_payload(exc):
    """Machine-readable description of ``exc`` and its exit code."""
    code = EXIT_NUMERICAL if isinstance(exc, NumericalError) else EXIT_INPUT
    err = {"type": type(exc).__name__, "message": str(exc), "exit_code": code}
    if isinstance(exc, ParseError) and exc.row is not None:
        err["row"] = exc.row
    if isinstance(exc, ValidationError) and exc.invariant is not None:
        err["invariant"] = exc.invariant
    if isinstance(exc, ConvergenceError):
        err["gap"] = exc.gap if exc.gap == exc.gap else None
        err["context"] = dict(exc.context)
    return {"error": err}, code


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command](args)
    except ObjperError as exc:
        payload, code = error_payload(exc)
    except OSError as exc:
        payload, code = {"error": {"type": type(exc).__name__, "message": str(exc),
                                   "exit_code": EXIT_INPUT}}, EXIT_INPUT
    else:
        return EXIT_OK
    sys.stderr.write(json.dumps(payload, sort_keys=True, default=float) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
