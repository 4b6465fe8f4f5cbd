"""Command line entry point: ``scholnet <subcommand> --config FILE [flags]``.

Exit codes: 0 ok, 2 input error, 3 config error, 4 internal invariant
violation. Failures print one JSON line on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import ScholnetError
from .pipeline import (
    SUBCOMMANDS,
    build_config,
    parse_category_filter,
    parse_year_range,
    read_config_file,
    run,
    with_overrides,
)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scholnet",
        description="institution collaboration and citation network analysis",
    )
    parser.add_argument("subcommand", choices=sorted(SUBCOMMANDS))
    parser.add_argument("--config", required=True, help="key = value config file")
    parser.add_argument("--threshold", type=float, help="normalized edit distance cutoff")
    parser.add_argument("--years", help="year range Y1..Y2 (snapshots or period slice)")
    parser.add_argument("--category", help="distance filter Y[,X]; X defaults to ALL")
    parser.add_argument("--top", type=int, help="number of knowledge hubs to list")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def _fail(exc: Exception, code: str, status: int) -> int:
    line = {"error": code, "type": type(exc).__name__, "message": str(exc)}
    print(json.dumps(line, sort_keys=True), file=sys.stderr)
    return status


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed usage; bad flags are config errors
        return 3 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config_path = Path(args.config)
        values = read_config_file(config_path)
        if args.threshold is not None:
            values["threshold"] = repr(args.threshold)
        if args.top is not None:
            values["top"] = str(args.top)
        config = build_config(values, config_path.parent)
        config = with_overrides(
            config,
            out=Path(args.out) if args.out else None,
            year_range=parse_year_range(args.years) if args.years else None,
            category_filter=parse_category_filter(args.category) if args.category else None,
        )
        written = run(args.subcommand, config)
    except ScholnetError as exc:
        return _fail(exc, exc.code, exc.exit_status)
    except (OSError, ValueError, UnicodeDecodeError) as exc:
        return _fail(exc, "INPUT_ERROR", 2)
    except Exception as exc:  # noqa: BLE001 - anything else is a bug
        return _fail(exc, "INTERNAL_ERROR", 4)
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())

