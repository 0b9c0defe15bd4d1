"""Command-line front end.

Subcommands: generate (emit a problem container), run (execute a config),
check (certify stored traces), plot (SVGs from stored traces), reference
(build or refresh a cached reference solution).

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 diagnostics
failure under check.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core import NumericalError
from .experiments import (
    ConfigError,
    check_run_dir,
    load_config,
    plot_run_dir,
    run_experiment,
)
from .problems import MAKERS, instance_descriptor, make_problem
from .reference import make_reference, reference_path
from .solvers import LinesearchStalled

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_DIAGNOSTICS = 4


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="adgd",
        description="Curvature-adaptive first-order methods: experiment harness",
    )
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a regenerable problem container")
    g.add_argument("--problem", required=True, choices=sorted(MAKERS))
    g.add_argument("--seed", type=int, default=1)
    _scale_flags(g)
    g.add_argument("--out", required=True, help="output JSON path")

    r = sub.add_parser("run", help="run the experiment matrix from a config")
    r.add_argument("--config", required=True)
    r.add_argument("--out", default=None, help="override the config output directory")
    r.add_argument("--seed", type=int, default=None, help="override the config seed")
    _scale_flags(r, default=None)
    r.add_argument("--check", action="store_true",
                   help="run diagnostics on the produced traces")

    c = sub.add_parser("check", help="re-run and certify a stored run directory")
    c.add_argument("--run", required=True, help="run directory with meta.json")

    pl = sub.add_parser("plot", help="render SVG plots from stored traces")
    pl.add_argument("--run", required=True)

    rf = sub.add_parser("reference", help="compute or refresh a cached reference")
    rf.add_argument("--problem", required=True, choices=sorted(MAKERS))
    rf.add_argument("--seed", type=int, default=1)
    _scale_flags(rf)
    rf.add_argument("--cache", required=True, help="reference cache directory")
    rf.add_argument("--force", action="store_true")
    return p


def _scale_flags(sp, default="desk") -> None:
    grp = sp.add_mutually_exclusive_group()
    grp.add_argument("--desk-scale", dest="scale", action="store_const",
                     const="desk", default=default)
    grp.add_argument("--paper-scale", dest="scale", action="store_const", const="paper")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "generate":
            inst = make_problem(args.problem, args.seed, args.scale)
            Path(args.out).parent.mkdir(parents=True, exist_ok=True)
            Path(args.out).write_text(
                json.dumps(instance_descriptor(inst), indent=2, sort_keys=True) + "\n",
                encoding="utf-8")
            print(f"wrote {args.out} ({inst.label}, dim={inst.dimension})")
            return EXIT_OK

        if args.command == "run":
            try:
                config = load_config(args.config)
            except (ConfigError, OSError) as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_CONFIG
            if args.out is not None:
                config.out = Path(args.out)
            if args.seed is not None:
                config.seed = args.seed
            if args.scale is not None:
                config.scale = args.scale
            results = run_experiment(config, record_traces=args.check)
            print(f"wrote {len(results)} trace(s) to {config.out}")
            if args.check:
                lines, ok = check_run_dir(config.out, Path(config.out) / "check_report.txt")
                print("\n".join(lines))
                if not ok:
                    return EXIT_DIAGNOSTICS
            return EXIT_OK

        if args.command == "check":
            lines, ok = check_run_dir(args.run, Path(args.run) / "check_report.txt")
            print("\n".join(lines))
            return EXIT_OK if ok else EXIT_DIAGNOSTICS

        if args.command == "plot":
            for path in plot_run_dir(args.run):
                print(f"wrote {path}")
            return EXIT_OK

        if args.command == "reference":
            inst = make_problem(args.problem, args.seed, args.scale)
            ref = make_reference(inst, args.cache, force=args.force)
            print(f"{inst.label}: F_ref={ref.F_star!r} tol={ref.tolerance:g}")
            print(f"  provenance: {ref.provenance}")
            print(f"  cache: {reference_path(args.cache, inst)}")
            return EXIT_OK
    except (NumericalError, LinesearchStalled) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
