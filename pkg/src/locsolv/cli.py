"""Command line: ``locsolv check`` and ``locsolv corpus run``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .estimator import ConvergenceFailure, GridTooCoarse
from .expr import UnboundOpaqueSymbol
from .forms import NotPSD
from .report import EXIT_INPUT, EXIT_NUMERIC, EXIT_VALIDATION, emit_report, run_check
from .specfile import ParseError, ValidationError


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="locsolv", description="Local solvability certificates for degenerate operators.")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="certify one spec file")
    c.add_argument("spec", type=Path)
    c.add_argument("--grid", type=int, help="grid points per axis (default 33)")
    c.add_argument("--mode", choices=["symbolic", "numeric", "auto"])
    c.add_argument("--estimate", action="store_true", help="add finite-difference estimates")
    c.add_argument("--shrink", type=int, default=0, metavar="K", help="estimates on K nested shrinking boxes")
    c.add_argument("--delta1", type=float)
    c.add_argument("--seed", type=int)
    c.add_argument("--json", type=Path, metavar="PATH", help="also write the JSON report here")
    c.add_argument("--format", choices=["text", "json"], default="text", help="stdout format")

    corp = sub.add_parser("corpus", help="bundled examples and controls")
    corp_sub = corp.add_subparsers(dest="corpus_command", required=True)
    r = corp_sub.add_parser("run", help="check every corpus entry against its documented outcome")
    r.add_argument("--filter", metavar="NAME")
    r.add_argument("--grid", type=int)
    return ap


def _check(args) -> int:
    try:
        report = run_check(
            args.spec,
            grid=args.grid,
            mode=args.mode,
            estimate_=args.estimate,
            shrink=args.shrink,
            delta1=args.delta1,
            seed=args.seed,
        )
    except (ConvergenceFailure, NotPSD, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, ParseError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValidationError, UnboundOpaqueSymbol, GridTooCoarse, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.json:
        args.json.write_bytes(emit_report(report, "json"))
    sys.stdout.write(emit_report(report, args.format).decode())
    return report.exit_code


def _corpus(args) -> int:
    from .corpus import run_corpus

    outcomes = run_corpus(args.filter, {"grid_points": args.grid})
    if not outcomes:
        print(f"no corpus entry matches {args.filter!r}", file=sys.stderr)
        return EXIT_INPUT
    for o in outcomes:
        print(o.line())
    bad = sum(not o.ok for o in outcomes)
    print(f"{len(outcomes) - bad}/{len(outcomes)} entries match their documented outcome")
    return 1 if bad else 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "check":
        return _check(args)
    return _corpus(args)


if __name__ == "__main__":
    sys.exit(main())
