"""Console entry points: plot-contour and plot-lines."""

from __future__ import annotations

import argparse
import sys

from .figures import (
    DEFAULT_LEVELS,
    ContourFigureSpec,
    LineplotFigureSpec,
    PlotkitError,
    render_contour,
    render_lineplot,
)


def main_contour(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot-contour", description="Render a calibration contour plot from a boldcal contour CSV."
    )
    parser.add_argument("csv", help="contour CSV (delta,gamma,posterior,spread)")
    parser.add_argument("--levels", nargs="+", type=float, default=list(DEFAULT_LEVELS),
                        help="contour levels in (0,1), default 0.95 0.9 0.8")
    parser.add_argument("--out", default="contour.png", help="output image path (default contour.png)")
    parser.add_argument("--no-annotations", action="store_true", help="skip the marker overlays")
    args = parser.parse_args(argv)
    try:
        spec = ContourFigureSpec(
            csv_path=args.csv, out_path=args.out,
            levels=tuple(args.levels), annotate=not args.no_annotations,
        )
        out = render_contour(spec)
    except (PlotkitError, OSError) as err:
        print(f"plot-contour: error: {err}", file=sys.stderr)
        return 2
    print(out)
    return 0


def main_lines(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot-lines", description="Render a recalibration lineplot from a boldcal lineplot CSV."
    )
    parser.add_argument("csv", help="lineplot CSV (label,y,x_original[,x_mle,x_t...])")
    parser.add_argument("--subsample", type=float, default=1.0,
                        help="fraction of rows to draw, in (0,1] (default 1: all)")
    parser.add_argument("--seed", type=int, default=0, help="subsampling seed (default 0)")
    parser.add_argument("--out", default="lines.png", help="output image path (default lines.png)")
    args = parser.parse_args(argv)
    try:
        spec = LineplotFigureSpec(
            csv_path=args.csv, out_path=args.out, subsample=args.subsample, seed=args.seed
        )
        out = render_lineplot(spec)
    except (PlotkitError, OSError) as err:
        print(f"plot-lines: error: {err}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main_contour())
