"""figgen command line: figgen <figure-id> --in PATH... --out PATH."""

from __future__ import annotations

import argparse
import sys

from .render import FIGURE_IDS, FigureSpec, InputError, render

EXIT_OK = 0
EXIT_VALIDATION = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figgen",
        description="Render analysis figures from sweep CSVs and training records",
    )
    parser.add_argument("figure_id", choices=FIGURE_IDS)
    parser.add_argument(
        "--in", dest="inputs", nargs="+", required=True, metavar="PATH",
        help="input CSV / JSONL files",
    )
    parser.add_argument("--out", required=True, help="output image path (PNG)")
    parser.add_argument(
        "--linear-y", action="store_true", help="linear instead of log y axis"
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec_args = dict(
        figure_id=args.figure_id,
        inputs=tuple(args.inputs),
        out=args.out,
        log_y=not args.linear_y,
    )
    try:
        render(FigureSpec(**spec_args))
    except (InputError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
