"""Command-line interface: ``plots render --figure <id> --in <csv> --out <img>``."""

from __future__ import annotations

import argparse
import sys

from .errors import PlotsError
from .figures import FIGURES


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots",
        description="Render simulation CSV output to publication-style figures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    render_p = sub.add_parser("render", help="render one figure CSV to an image")
    render_p.add_argument(
        "--figure", required=True, choices=sorted(FIGURES), help="preset id"
    )
    render_p.add_argument(
        "--in", dest="csv_in", required=True, metavar="CSV",
        help="input CSV produced by the simulation CLI",
    )
    render_p.add_argument(
        "--out", required=True, metavar="IMAGE", help="output .png or .svg path"
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    from .render import render  # deferred: keeps --help fast

    try:
        written = render(args.figure, args.csv_in, args.out)
    except PlotsError as exc:
        print(f"plots: error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {written}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
