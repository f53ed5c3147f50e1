"""Three-panel scatter of point patches viewed down the polar axis.

Input: three patch CSVs (x,y,z rows) given as repeated --in flags; panels
keep the input order and take their titles from the file names.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io
from .io import SchemaError

import matplotlib.pyplot as plt


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--in",
        dest="inputs",
        action="append",
        required=True,
        metavar="PATCH_CSV",
        help="patch file; give exactly three",
    )
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument(
        "--raster", action="store_true", help="write PNG instead of the default SVG"
    )
    return parser


def render(paths: list[str], out: str, raster: bool) -> list[int]:
    patches = [io.read_patch(p) for p in paths]
    fig, axes = plt.subplots(1, 3, figsize=(12, 4.2))
    counts = []
    for ax, path, pts in zip(axes, paths, patches):
        ax.scatter(pts[:, 0], pts[:, 1], s=12, color="black")
        ax.set_aspect("equal")
        ax.set_title(f"{Path(path).stem} ({pts.shape[0]} points)")
        ax.set_xticks([])
        ax.set_yticks([])
        counts.append(pts.shape[0])
    fig.tight_layout()
    try:
        io.save_atomic(fig, out, raster)
    finally:
        plt.close(fig)
    return counts


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if len(args.inputs) != 3:
        print(f"plot-fig1: need exactly three --in files, got {len(args.inputs)}", file=sys.stderr)
        return 1
    try:
        counts = render(args.inputs, args.out, args.raster)
    except SchemaError as exc:
        print(f"plot-fig1: {exc}", file=sys.stderr)
        return 1
    print(" ".join(f"{Path(p).stem}={c}" for p, c in zip(args.inputs, counts)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
