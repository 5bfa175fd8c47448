"""Command line interface.

Exit codes: 0 certified / member / all checks pass, 1 negative result,
2 input or schema error, 3 invalid state parameters.
"""
import argparse
import csv
from datetime import datetime, timezone
import io
import json
from pathlib import Path
import sys

from . import __version__
from .behavior import Behavior, BehaviorError, SignalingError
from .polytopes import enumerate_fully_local, enumerate_two_way_local, membership
from .quantum import (
    BRANCHES,
    DensityMatrix,
    SettingsError,
    StateError,
    bell_state,
    biseparable_state,
    born_behavior,
    gghz_state,
    ghz_state,
    noisy_w,
    w_state,
)
from .reproduce import TARGETS, all_passed, format_table, load_settings
from .search import SearchConfig, SearchError, maximize_witness
from .witnesses import DEFAULT_TOL_MARGINAL, DEFAULT_TOL_MERMIN, witness_report

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_PARAM = 0, 1, 2, 3


class CLIError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def parse_state(text):
    """w | ghz | white | product | noisy-w:V | gghz:THETA | biseparable:BRANCH[:BELL]"""
    kind, _, arg = text.partition(":")
    try:
        if kind == "w":
            return w_state()
        if kind == "ghz":
            return ghz_state()
        if kind == "white":
            return noisy_w(0.0)
        if kind == "product":
            return DensityMatrix.pure([1, 0, 0, 0, 0, 0, 0, 0], "|000>")
        if kind == "noisy-w":
            return noisy_w(float(arg))
        if kind == "gghz":
            return gghz_state(float(arg))
        if kind == "biseparable":
            branch, _, bell = arg.partition(":")
            if branch not in BRANCHES:
                raise StateError(f"biseparable branch must be one of {BRANCHES}")
            return biseparable_state(branch, [1, 0], bell_state(bell or "psi-"))
    except ValueError as exc:
        raise CLIError(f"invalid state parameters in {text!r}: {exc}", EXIT_PARAM) from None
    raise CLIError(f"unknown state kind {kind!r}", EXIT_INPUT)


def manifest(args, argv):
    tolerances = {
        k: getattr(args, k) for k in ("tol_mermin", "tol_marginal") if hasattr(args, k)
    }
    arguments = {
        k: v for k, v in sorted(vars(args).items()) if k not in ("func",) and not callable(v)
    }
    return {
        "command": args.command,
        "arguments": arguments,
        "argv": list(argv),
        "seed": getattr(args, "seed", None),
        "tolerances": tolerances,
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def emit(report, fmt, out, csv_rows=None):
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        rows = csv_rows if csv_rows is not None else [("key", "value")] + list(_flatten(report))
        writer.writerows(rows)
        out.write(buf.getvalue())
    else:
        out.write(json.dumps(report, indent=2, sort_keys=False) + "\n")


def read_behavior(path):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        return Behavior.from_json(json.loads(text))
    except (OSError, json.JSONDecodeError, BehaviorError) as exc:
        raise CLIError(f"cannot read behavior {path!r}: {exc}", EXIT_INPUT) from None


def cmd_behavior_gen(args, argv, out):
    rho = parse_state(args.state)
    try:
        settings = load_settings(args.settings)
    except OSError as exc:
        raise CLIError(f"cannot read settings: {exc}", EXIT_INPUT) from None
    except (SettingsError, json.JSONDecodeError) as exc:
        raise CLIError(f"settings schema error: {exc}", EXIT_INPUT) from None
    p = born_behavior(rho, settings)
    meta = {
        "state": rho.label,
        "provenance": rho.provenance,
        "settings": settings.to_json(),
        "manifest": manifest(args, argv),
    }
    emit(p.to_json(meta), args.format, out, p.to_csv_rows() if args.format == "csv" else None)
    return EXIT_OK


def cmd_witness(args, argv, out):
    p = read_behavior(args.behavior)
    try:
        report = witness_report(p, args.tol_mermin, args.tol_marginal)
    except SignalingError as exc:
        raise CLIError(str(exc), EXIT_INPUT) from None
    body = report.to_json()
    body["manifest"] = manifest(args, argv)
    emit(body, args.format, out)
    return EXIT_OK if report.certificate.certified else EXIT_NEGATIVE


def _vertex_set(name):
    return enumerate_fully_local() if name == "local" else enumerate_two_way_local()


def cmd_polytope(args, argv, out):
    p = read_behavior(args.behavior)
    try:
        verdict = membership(p, _vertex_set(args.set), exact=args.exact)
    except SignalingError as exc:
        raise CLIError(str(exc), EXIT_INPUT) from None
    body = {"set": args.set, **verdict.to_json(), "manifest": manifest(args, argv)}
    emit(body, args.format, out)
    return EXIT_OK if verdict.member else EXIT_NEGATIVE


def cmd_vertices(args, argv, out):
    json.dump(_vertex_set(args.set).to_json(), out)
    out.write("\n")
    return EXIT_OK


def cmd_reproduce(args, argv, out):
    p, checks = TARGETS[args.target]()
    body = {
        "target": args.target,
        "checks": [c.to_json() for c in checks],
        "all_passed": all_passed(checks),
        "behavior": p.to_json(),
        "manifest": manifest(args, argv),
    }
    if args.json:
        Path(args.json).write_text(json.dumps(body, indent=2) + "\n")
    if args.format == "json":
        emit(body, "json", out)
    elif args.format == "csv":
        emit(body, "csv", out, [("quantity", "computed", "quoted", "tolerance", "passed")]
             + [tuple(c.to_json().values()) for c in checks])
    else:
        out.write(format_table(checks) + "\n")
    return EXIT_OK if all_passed(checks) else EXIT_NEGATIVE


def cmd_optimize(args, argv, out):
    rho = parse_state(args.state)
    try:
        cfg = SearchConfig(args.restarts, args.max_iterations, args.shrink_tol, args.seed)
        result = maximize_witness(rho, args.objective, cfg)
    except SearchError as exc:
        raise CLIError(str(exc), EXIT_PARAM) from None
    body = result.to_json()
    if args.target_value is not None:
        body["threshold_visibility"] = args.target_value / result.best_value
    body["manifest"] = manifest(args, argv)
    emit(body, args.format, out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="gmecert", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def fmt(p):
        p.add_argument("--format", choices=("json", "csv"), default="json")

    def tols(p):
        p.add_argument("--tol-mermin", type=float, default=DEFAULT_TOL_MERMIN)
        p.add_argument("--tol-marginal", type=float, default=DEFAULT_TOL_MARGINAL)

    beh = sub.add_parser("behavior", help="generate behaviors")
    beh_sub = beh.add_subparsers(dest="action", required=True)
    gen = beh_sub.add_parser("gen", help="Born-rule behavior for a state and settings")
    gen.add_argument("--state", required=True, help=parse_state.__doc__)
    gen.add_argument("--settings", required=True,
                     help="settings JSON path or one of appendix-a, appendix-b, ghz-xy")
    fmt(gen)
    gen.set_defaults(func=cmd_behavior_gen)

    wit = sub.add_parser("witness", help="witness values and certification for a behavior")
    wit.add_argument("behavior", help="behavior JSON path, or - for stdin")
    tols(wit)
    fmt(wit)
    wit.set_defaults(func=cmd_witness)

    pol = sub.add_parser("polytope", help="LP membership in the local or two-way-local polytope")
    pol.add_argument("behavior")
    pol.add_argument("--set", choices=("local", "two-way"), default="local")
    pol.add_argument("--exact", action="store_true", help="exact rational simplex")
    fmt(pol)
    pol.set_defaults(func=cmd_polytope)

    ver = sub.add_parser("vertices", help="export a vertex set as JSON")
    ver.add_argument("--set", choices=("local", "two-way"), default="local")
    ver.set_defaults(func=cmd_vertices)

    rep = sub.add_parser("reproduce", help="recompute a published example")
    rep.add_argument("target", choices=sorted(TARGETS))
    rep.add_argument("--format", choices=("table", "json", "csv"), default="table")
    rep.add_argument("--json", metavar="PATH", help="also write the JSON report here")
    rep.set_defaults(func=cmd_reproduce)

    opt = sub.add_parser("optimize", help="maximize a witness over measurement settings")
    opt.add_argument("--state", required=True, help=parse_state.__doc__)
    opt.add_argument("--objective", choices=("mermin", "svetlichny", "chsh_pair"), default="mermin")
    opt.add_argument("--seed", type=int, default=42)
    opt.add_argument("--restarts", type=int, default=64)
    opt.add_argument("--max-iterations", type=int, default=2000)
    opt.add_argument("--shrink-tol", type=float, default=1e-10)
    opt.add_argument("--target-value", type=float, default=None,
                     help="also report target / best value (threshold visibility)")
    fmt(opt)
    opt.set_defaults(func=cmd_optimize)
    return parser


def main(argv=None, out=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, argv, out)
    except CLIError as exc:
        print(f"gmecert: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
