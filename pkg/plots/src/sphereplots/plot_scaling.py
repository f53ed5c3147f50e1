"""Log-log chart of one scaling report: per-point samples and the fitted line.

The slope, intercept and acceptance band are read from the report's repeated
fit columns; nothing is refitted here.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io
from .io import SchemaError

import matplotlib.pyplot as plt


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="report", required=True, help="scaling report CSV")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument(
        "--raster", action="store_true", help="write PNG instead of the default SVG"
    )
    return parser


def render(report_path: str, out: str, raster: bool) -> None:
    rep = io.read_scaling(report_path)
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    ax.scatter(rep.N, rep.value, s=18, color="black", zorder=3, label="samples")
    grid = np.geomspace(rep.N.min(), rep.N.max(), 64)
    ax.plot(
        grid,
        np.exp(rep.intercept) * grid**rep.slope,
        color="firebrick",
        label=f"fit, slope {rep.slope:.3f}",
    )
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("N")
    ax.set_ylabel(rep.target)
    verdict = "inside" if rep.in_band else "OUTSIDE"
    ax.set_title(
        f"{rep.target}: slope {rep.slope:.3f}, "
        f"band [{rep.band_lo:g}, {rep.band_hi:g}] ({verdict})"
    )
    ax.legend(fontsize=8)
    fig.tight_layout()
    try:
        io.save_atomic(fig, out, raster)
    finally:
        plt.close(fig)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        render(args.report, args.out, args.raster)
    except SchemaError as exc:
        print(f"plot-scaling: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
