"""Command-line entry point.

    tempdrift <subcommand> --config <path> [--seed U64] [--threads N]
              [--out DIR] [--drift-split all|train]
              [--correlate-with one_shot|obs_mean] [--strict]

Subcommands: ingest, segment, drift, perf, correlate, report, all. Flags
override config fields, which override built-in defaults. Exit codes:
0 success, 2 config error, 3 data error, 4 numeric/degenerate error.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, DataError, DegenerateDataError
from .pipeline import STAGES, load_config, run_pipeline, run_stage

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tempdrift",
        description="Quantify temporal drift in text corpora and relate it "
                    "to model-performance changes.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in STAGES + ("all",):
        cmd = sub.add_parser(name, help=f"run the {name} stage" if name != "all"
                             else "run the full pipeline")
        cmd.add_argument("--config", required=True, help="JSON run configuration")
        cmd.add_argument("--seed", type=int, default=None,
                         help="override master_seed (unsigned 64-bit)")
        cmd.add_argument("--threads", type=int, default=None,
                         help="worker-thread cap (results are independent of N)")
        cmd.add_argument("--out", default=None, help="override output_dir")
        cmd.add_argument("--drift-split", choices=("all", "train"), default=None,
                         help="measure drift on full domains or train sides only")
        cmd.add_argument("--correlate-with", choices=("one_shot", "obs_mean"),
                         default=None, help="drift value used for correlation")
        cmd.add_argument("--strict", action="store_true", default=None,
                         help="error on unassignable documents / unbalanced runs")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {
        "master_seed": args.seed,
        "threads": args.threads,
        "output_dir": args.out,
        "drift_split": args.drift_split,
        "correlate_with": args.correlate_with,
        "strict_assignment": args.strict,
    }
    try:
        config = load_config(args.config, overrides)
        if args.command == "all":
            run_pipeline(config)
        else:
            run_stage(config, args.command)
    except ConfigError as exc:
        print(f"tempdrift: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateDataError as exc:
        print(f"tempdrift: degenerate data: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DataError as exc:
        print(f"tempdrift: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
