"""Command line for the figure generator: ``kgplots <kind> --in ... --out ...``."""

from __future__ import annotations

import argparse
import sys

from .figures import SCHEMAS, FigureSpec, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="kgplots",
        description="Render figures from lattice Klein-Gordon study CSVs",
    )
    parser.add_argument("kind", choices=sorted(SCHEMAS), help="figure kind")
    parser.add_argument(
        "--in", dest="inputs", action="append", required=True,
        help="input csv (repeatable)",
    )
    parser.add_argument("--out", required=True, help="output image (.png or .svg)")
    parser.add_argument("--logx", action="store_true", help="force log x axis")
    parser.add_argument("--logy", action="store_true", help="force log y axis")
    args = parser.parse_args(argv)
    spec = FigureSpec(
        kind=args.kind,
        inputs=tuple(args.inputs),
        output=args.out,
        logx=args.logx or None,
        logy=args.logy or None,
    )
    try:
        out = render(spec)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
