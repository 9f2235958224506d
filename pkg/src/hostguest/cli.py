"""Command line entry point.

Exit codes: 0 on success, 1 for configuration problems (bad JSON, schema
violations, unknown scenario kinds, bad sweep paths), 2 for runtime
failures inside an otherwise valid scenario.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError, HostGuestError
from .scenarios import SCENARIO_KINDS, config_schema, load_config, run_scenario, validate_config


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hostguest",
        description="Run host-guest emitter scenario configs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="validate a config, execute it, write artifacts")
    run.add_argument("config", type=Path)
    run.add_argument(
        "--output-dir",
        type=Path,
        default=None,
        help="overrides the config's output_dir",
    )
    run.add_argument(
        "--threads",
        type=int,
        default=1,
        help="worker threads for sweep points (default 1)",
    )

    val = sub.add_parser("validate", help="check a config without running it")
    val.add_argument("config", type=Path)

    schema = sub.add_parser("schema", help="print the JSON schema for a scenario kind")
    schema.add_argument("kind", choices=sorted(SCENARIO_KINDS))

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "schema":
            json.dump(config_schema(args.kind), sys.stdout, indent=2, sort_keys=True)
            sys.stdout.write("\n")
            return 0
        if args.command == "validate":
            validate_config(load_config(args.config))
            print(f"ok: {args.config}")
            return 0
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        out = run_scenario(
            load_config(args.config),
            config_dir=args.config.resolve().parent,
            output_dir=args.output_dir,
            threads=args.threads,
        )
        print(f"wrote {out}")
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except HostGuestError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
