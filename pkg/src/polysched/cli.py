"""Command-line front end: parse -> deps -> schedule -> post-process ->
verify -> emit.

Exit codes: 0 success (and: verification passed), 1 usage or input error,
2 the configuration admits no legal schedule, 3 verification failure.
Stdout carries only the primary artifact; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys

from .config import Config, parse_config
from .deps import compute_dependences, emit_dependences, parse_dependences
from .errors import ConfigInfeasible, PolyschedError
from .scheduler import schedule as run_scheduler
from .scop import emit_schedule, parse_schedule, parse_scop
from .tiling import tile
from .verify import enumerate_dates, print_loops, verify_legality

DEFAULT_PARAM_VALUE = 6


def _bool(text: str) -> bool:
    if text.lower() in ("true", "1", "yes", "on"):
        return True
    if text.lower() in ("false", "0", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="polysched",
        description="Configurable iterative polyhedral scheduler")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("input", help="mini-SCoP JSON file")
        p.add_argument("--param", action="append", default=[],
                       metavar="NAME=INT",
                       help="parameter value (repeatable); unset parameters "
                            f"default to {DEFAULT_PARAM_VALUE}")
        p.add_argument("--output", help="write the artifact here instead of "
                                        "stdout")

    p = sub.add_parser("schedule", help="compute a schedule")
    add_common(p)
    p.add_argument("--config", help="configuration JSON file")
    p.add_argument("--deps", help="pre-computed dependence JSON file")
    p.add_argument("--compute-dependencies", type=_bool, default=True,
                   metavar="BOOL", help="compute dependences when no --deps "
                                        "file is given (default true)")
    p.add_argument("--tiling", type=_bool, default=False, metavar="BOOL",
                   help="apply the configuration's tile sizes (default "
                        "false)")
    p.add_argument("--verify", action="store_true",
                   help="verify the result by enumeration before emitting")
    p.add_argument("--format", choices=["json", "matrix-text"],
                   default="json")
    p.add_argument("--seed", type=int, default=0,
                   help="reserved; scheduling is deterministic")

    p = sub.add_parser("deps", help="emit the dependence set")
    add_common(p)

    p = sub.add_parser("verify", help="check a schedule by enumeration")
    add_common(p)
    p.add_argument("--schedule", required=True, help="schedule JSON file")
    p.add_argument("--deps", help="pre-computed dependence JSON file")

    p = sub.add_parser("print", help="print a pseudo-loop sketch")
    add_common(p)
    p.add_argument("--schedule", help="schedule JSON file (computed with "
                                      "--config when omitted)")
    p.add_argument("--config", help="configuration JSON file")
    return ap


def _read(path: str) -> bytes:
    with open(path, "rb") as f:
        return f.read()


def _params(scop, pairs):
    out = {p: DEFAULT_PARAM_VALUE for p in scop.parameters}
    for pair in pairs:
        name, _, value = pair.partition("=")
        if not _ or not value.lstrip("-").isdigit():
            raise PolyschedError(f"bad --param {pair!r}, expected NAME=INT")
        out[name] = int(value)
    return out


def _write(data: bytes, output):
    if output:
        with open(output, "wb") as f:
            f.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _deps_for(args, scop, compute=True):
    if getattr(args, "deps", None):
        return parse_dependences(_read(args.deps), scop)
    if compute:
        return compute_dependences(scop)
    return []


def _cmd_schedule(args) -> int:
    scop = parse_scop(_read(args.input))
    config = parse_config(_read(args.config)) if args.config else Config()
    deps = _deps_for(args, scop, args.compute_dependencies)
    sched = run_scheduler(scop, deps, config)
    if args.tiling:
        if config.tiling:
            sched = tile(sched, scop, config.tiling)
        else:
            print("polysched: --tiling requested but the configuration "
                  "names no tile sizes", file=sys.stderr)
    code = 0
    if args.verify:
        report = verify_legality(scop, sched, deps, _params(scop, args.param))
        if not report.legal:
            print(f"polysched: verification failed: "
                  f"{len(report.violations)} violation(s), "
                  f"{len(report.parallel_flag_errors)} flag error(s)",
                  file=sys.stderr)
            code = 3
    _write(emit_schedule(scop, sched, args.format), args.output)
    return code


def _cmd_deps(args) -> int:
    scop = parse_scop(_read(args.input))
    _write(emit_dependences(compute_dependences(scop)), args.output)
    return 0


def _cmd_verify(args) -> int:
    scop = parse_scop(_read(args.input))
    sched = parse_schedule(_read(args.schedule), scop)
    deps = _deps_for(args, scop)
    report = verify_legality(scop, sched, deps, _params(scop, args.param))
    _write(report.emit(), args.output)
    return 0 if report.legal else 3


def _cmd_print(args) -> int:
    scop = parse_scop(_read(args.input))
    if args.schedule:
        sched = parse_schedule(_read(args.schedule), scop)
    else:
        config = parse_config(_read(args.config)) if args.config else Config()
        sched = run_scheduler(scop, compute_dependences(scop), config)
    trace = enumerate_dates(scop, sched, _params(scop, args.param))
    _write(print_loops(trace, scop, sched).encode("utf-8"), args.output)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "schedule": _cmd_schedule,
        "deps": _cmd_deps,
        "verify": _cmd_verify,
        "print": _cmd_print,
    }
    try:
        return handlers[args.command](args)
    except ConfigInfeasible as e:
        print(f"polysched: configuration infeasible: {e}", file=sys.stderr)
        return 2
    except (PolyschedError, OSError, ValueError) as e:
        print(f"polysched: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
