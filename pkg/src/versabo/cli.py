"""Command-line interface for the benchmark harness.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bench import ConfigError, parse_config, run_benchmark
from .models import list_models
from .systems import list_systems


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="versabo")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a benchmark configuration")
    run.add_argument("--config", required=True, help="path to a JSON configuration")
    run.add_argument("--out", required=True, help="output directory for CSV files")
    run.add_argument("--trials", type=int, default=None, help="override trial count")
    run.add_argument("--seed", type=int, default=None, help="override master seed")
    run.add_argument("--combine-rule", choices=("standard", "as-printed"), default=None,
                     help="acceptance rule used when combining ensemble sample sets")
    run.add_argument("--serial", action="store_true", help="run trials sequentially")
    run.add_argument("--timing", action="store_true",
                     help="record wall times in the trace CSV (breaks byte-reproducibility)")

    sub.add_parser("list-models", help="print available model ids")
    sub.add_parser("list-systems", help="print available system ids")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "list-models":
        for mid in list_models():
            print(mid)
        return 0
    if args.command == "list-systems":
        for sid in list_systems():
            print(sid)
        return 0

    try:
        with open(args.config) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        print(f"error: cannot read configuration: {err}", file=sys.stderr)
        return 2
    if args.trials is not None:
        doc["trials"] = args.trials
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.combine_rule is not None:
        doc["combine_rule"] = args.combine_rule
    if args.timing:
        doc["record_timing"] = True
    try:
        config = parse_config(doc)
    except ConfigError as err:
        print(f"error: invalid configuration: {err}", file=sys.stderr)
        return 2
    try:
        paths = run_benchmark(config, args.out, serial=args.serial)
    except Exception as err:  # noqa: BLE001 - CLI boundary
        print(f"error: benchmark run failed: {err}", file=sys.stderr)
        return 3
    print(f"wrote {paths['trace']}")
    print(f"wrote {paths['summary']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
