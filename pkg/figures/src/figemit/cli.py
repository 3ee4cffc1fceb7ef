"""Command-line entry point: figemit render --data ... --spec ... --out ..."""

import argparse
import sys

import matplotlib.pyplot as plt

from ._version import __version__
from .render import RenderJob, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figemit",
        description="draw a static figure from a figure-data CSV and its spec JSON",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render one figure")
    p.add_argument("--data", required=True, help="figure-data CSV")
    p.add_argument("--spec", required=True, help="figure spec JSON")
    p.add_argument("--out", required=True, help="output image (.png or .svg)")
    p.add_argument("--dpi", type=int, default=150, help="raster resolution")
    p.add_argument(
        "--size",
        type=float,
        nargs=2,
        metavar=("W", "H"),
        help="figure size in inches (default depends on figure)",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = RenderJob(
            data=args.data,
            spec=args.spec,
            out=args.out,
            dpi=args.dpi,
            size=tuple(args.size) if args.size else None,
        )
        fig = render(job)
        plt.close(fig)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
