"""Command-line entry point: one subcommand per experiment kind.

Exit codes: 0 all checks pass, 1 check failures, 2 configuration or
validation problems, 3 internal numeric failures.
"""

import argparse
import sys

from .errors import ConfigurationError, DomainError, NumericError, PreconditionError
from .harness import EXPERIMENT_KINDS, list_experiments, parse_config, run, run_kind

__all__ = ["main"]


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="fracheat",
        description="experiment runner for the fractional-diffusion suite")
    sub = ap.add_subparsers(dest="command", required=True)
    for kind in sorted(EXPERIMENT_KINDS) + ["all"]:
        sp = sub.add_parser(kind, help=EXPERIMENT_KINDS.get(kind, "run every experiment kind"))
        sp.add_argument("--config", default=None, help="INI or JSON config file")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--threads", type=int, default=1,
                        help="reserved; runs are single-threaded for determinism")
        sp.add_argument("--strict", action="store_true",
                        help="advisory warnings become failures")
    sub.add_parser("list", help="print the experiment catalog")
    return ap


def _print_report(report):
    for c in report.checks:
        tag = "PASS" if c["passed"] else "FAIL"
        print(f"  [{tag}] {c['name']}: {c['value']:.6g} (tol {c['tolerance']:.6g})")
    for name, path in report.artifacts.items():
        print(f"  artifact {name}: {path}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "list":
        for entry in list_experiments():
            print(f"{entry['kind']}: {entry['description']}")
        return 0
    try:
        if args.command == "all":
            worst = 0
            for kind in sorted(EXPERIMENT_KINDS):
                out = f"{args.out or 'artifacts'}/{kind}"
                print(f"== {kind} ==")
                report, code = run_kind(kind, out_dir=out, strict=args.strict)
                _print_report(report)
                worst = max(worst, code)
            return worst
        if args.config is not None:
            cfg = parse_config(args.config)
            if cfg.kind != args.command:
                print(f"config is for kind {cfg.kind!r}, "
                      f"subcommand was {args.command!r}", file=sys.stderr)
                return 2
            report, code = run(args.config, out_dir=args.out, strict=args.strict)
        else:
            out = args.out or f"artifacts/{args.command}"
            report, code = run_kind(args.command, out_dir=out, strict=args.strict)
        _print_report(report)
        return code
    except (ConfigurationError, DomainError, PreconditionError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2
    except NumericError as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
