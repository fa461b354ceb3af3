"""Command-line entry point: ``ncbrst <command> --preset jordan --dim 2``."""
from __future__ import annotations

import argparse
import sys

from .scenario import COMMANDS, CHECKS, ScenarioError, emit, load_scenario, run


def _dims(s):
    try:
        return [int(x) for x in s.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dimension vector {s!r}; use e.g. 2 or 1,1")


def parser():
    p = argparse.ArgumentParser(prog="ncbrst", description="Exact checks for noncommutative BRST complexes.")
    p.add_argument("command", choices=sorted(COMMANDS) + ["all"])
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", help="YAML or JSON scenario file")
    src.add_argument("--preset", help="jordan, genus-g, gauge, laurent, group-group, star")
    p.add_argument("--genus", type=int, default=2, help="g for the genus-g preset")
    p.add_argument("--dim", type=_dims, help="dimension vector, e.g. 2 or 1,1")
    p.add_argument("--max-weight", type=int, help="weight bound for homology slices")
    p.add_argument("--format", choices=["text", "json", "csv"], default="text")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for weight slices")
    p.add_argument("--output", "-o", help="write the report here instead of stdout")
    return p


def main(argv=None):
    args = parser().parse_args(argv)
    try:
        sc = load_scenario(args.scenario) if args.scenario else load_scenario(args.preset, args.genus)
        if args.dim is not None:
            sc.dimension = args.dim
        if args.max_weight is not None:
            if args.max_weight < 0:
                raise ScenarioError("--max-weight must be non-negative")
            sc.max_weight = args.max_weight
        checks = sc.checks if args.command == "all" else list(COMMANDS[args.command])
        rep = run(sc, checks, jobs=args.jobs)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = emit(rep, args.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
