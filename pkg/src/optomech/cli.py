"""Command-line front end: ``optomech <scenario> [--config f] [--set k=v] [--out d]``.

Exit codes: 0 on success, 2 when the configuration is invalid (every problem
is listed, not just the first), 3 when a solver fails.  Without ``--out`` the
result CSV is printed to stdout; with it, ``<name>.csv`` and
``<name>.meta.json`` are written into the directory.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConfigValidationError, OptomechError
from .scenarios import SCENARIOS, describe_defaults, run_scenario, validate_config


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optomech",
        description=(
            "Deterministic scenario runner for trapped-membrane resonator "
            "models: mode spectra, dissipation limits, tether spectra, "
            "optical-spring response, readout coupling, cavity eigenmodes, "
            "and coherence budgets."
        ),
        epilog="Scenario keys and defaults:\n\n" + describe_defaults(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("scenario", choices=sorted(SCENARIOS),
                        help="which computation to run")
    parser.add_argument("--config", metavar="FILE",
                        help="YAML config file (all keys optional unless noted)")
    parser.add_argument("--set", metavar="KEY=VALUE", action="append", default=[],
                        dest="overrides",
                        help="override one config key (repeatable, wins over --config)")
    parser.add_argument("--out", metavar="DIR",
                        help="write <name>.csv and <name>.meta.json here "
                             "(default: print CSV to stdout)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)

    raw_text = ""
    if args.config is not None:
        path = Path(args.config)
        if not path.is_file():
            print(f"error: config file not found: {path}", file=sys.stderr)
            return 2
        raw_text = path.read_text(encoding="utf-8")

    try:
        config = validate_config(args.scenario, raw_text, args.overrides)
    except ConfigValidationError as exc:
        print(f"error: invalid configuration for scenario '{args.scenario}':",
              file=sys.stderr)
        for item in exc.errors:
            print(f"  - {item}", file=sys.stderr)
        return 2

    try:
        table = run_scenario(config, out_dir=args.out)
    except ConfigValidationError as exc:
        print(f"error: scenario '{args.scenario}': {exc}", file=sys.stderr)
        return 2
    except OptomechError as exc:
        print(f"error: scenario '{args.scenario}' failed: {exc}", file=sys.stderr)
        return 3

    if args.out is not None:
        base = config.params["id"] if config.scenario == "figure" else config.scenario
        out = Path(args.out)
        print(f"wrote {out / f'{base}.csv'} ({len(table.rows)} rows) "
              f"and {out / f'{base}.meta.json'}")
    else:
        sys.stdout.write(table.csv_text())
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
