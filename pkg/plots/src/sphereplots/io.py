"""Schema readers and atomic figure saving.

Each reader parses one documented spherepts CSV schema and raises SchemaError
on any deviation.  Readers return plain numpy arrays; no statistic is ever
recomputed here.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

import matplotlib

matplotlib.use("Agg")  # headless; must precede pyplot everywhere


class SchemaError(ValueError):
    """Input file does not match the documented schema."""


def _read_lines(path: str | Path) -> list[str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SchemaError(f"{path}: {exc}") from None
    return [line for line in text.splitlines() if line.strip()]


def _float(path, lineno: int, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise SchemaError(f"{path}:{lineno}: not a number: {text!r}") from None
    if math.isnan(value):
        raise SchemaError(f"{path}:{lineno}: NaN is not allowed")
    return value


def read_patch(path: str | Path) -> np.ndarray:
    """Point patch: header x,y,z then float rows; at least one point."""
    lines = _read_lines(path)
    if not lines or lines[0] != "x,y,z":
        raise SchemaError(f"{path}: expected header 'x,y,z'")
    rows = []
    for i, line in enumerate(lines[1:], 2):
        parts = line.split(",")
        if len(parts) != 3:
            raise SchemaError(f"{path}:{i}: expected 3 fields, got {len(parts)}")
        rows.append([_float(path, i, p) for p in parts])
    if not rows:
        raise SchemaError(f"{path}: patch has no points")
    return np.array(rows)


@dataclass(frozen=True)
class SpacingHistogram:
    left: np.ndarray
    right: np.ndarray  # finite bins only; the overflow bin is kept separate
    mass: np.ndarray
    overflow: float


def read_spacing(path: str | Path) -> SpacingHistogram:
    """Histogram: header bin_left,bin_right,mass; last row has right = inf;
    masses must sum to 1 within 1e-9."""
    lines = _read_lines(path)
    if not lines or lines[0] != "bin_left,bin_right,mass":
        raise SchemaError(f"{path}: expected header 'bin_left,bin_right,mass'")
    left, right, mass = [], [], []
    overflow = None
    for i, line in enumerate(lines[1:], 2):
        parts = line.split(",")
        if len(parts) != 3:
            raise SchemaError(f"{path}:{i}: expected 3 fields, got {len(parts)}")
        if overflow is not None:
            raise SchemaError(f"{path}:{i}: rows after the overflow bin")
        if parts[1] == "inf":
            overflow = _float(path, i, parts[2])
            continue
        lo = _float(path, i, parts[0])
        hi = _float(path, i, parts[1])
        if not hi > lo:
            raise SchemaError(f"{path}:{i}: bin must satisfy left < right")
        m = _float(path, i, parts[2])
        if m < 0:
            raise SchemaError(f"{path}:{i}: negative mass")
        left.append(lo)
        right.append(hi)
        mass.append(m)
    if not left:
        raise SchemaError(f"{path}: histogram has no finite bins")
    if overflow is None:
        raise SchemaError(f"{path}: missing the trailing overflow bin (right = inf)")
    if overflow < 0:
        raise SchemaError(f"{path}: negative overflow mass")
    total = float(np.sum(mass)) + overflow
    if abs(total - 1.0) > 1e-9:
        raise SchemaError(f"{path}: masses sum to {total!r}, not 1 within 1e-9")
    return SpacingHistogram(
        left=np.array(left), right=np.array(right), mass=np.array(mass), overflow=overflow
    )


def read_curve(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Reference curve: header s,density with density = e^-s within 1e-12."""
    lines = _read_lines(path)
    if not lines or lines[0] != "s,density":
        raise SchemaError(f"{path}: expected header 's,density'")
    s, d = [], []
    for i, line in enumerate(lines[1:], 2):
        parts = line.split(",")
        if len(parts) != 2:
            raise SchemaError(f"{path}:{i}: expected 2 fields, got {len(parts)}")
        s.append(_float(path, i, parts[0]))
        d.append(_float(path, i, parts[1]))
        if abs(d[-1] - math.exp(-s[-1])) > 1e-12:
            raise SchemaError(f"{path}:{i}: density is not e^-s within 1e-12")
    if not s:
        raise SchemaError(f"{path}: curve has no samples")
    return np.array(s), np.array(d)


SCALING_HEADER = "target,N,seed,n,value,slope,intercept,band_lo,band_hi,in_band"


@dataclass(frozen=True)
class ScalingReport:
    target: str
    N: np.ndarray
    value: np.ndarray
    slope: float
    intercept: float
    band_lo: float
    band_hi: float
    in_band: bool


def read_scaling(path: str | Path) -> ScalingReport:
    """Per-point scaling rows; the fit columns must be constant across rows."""
    lines = _read_lines(path)
    if not lines or lines[0] != SCALING_HEADER:
        raise SchemaError(f"{path}: expected header '{SCALING_HEADER}'")
    if len(lines) < 3:
        raise SchemaError(f"{path}: need at least two data rows for a slope")
    targets, fits, ns, values = set(), set(), [], []
    for i, line in enumerate(lines[1:], 2):
        parts = line.split(",")
        if len(parts) != 10:
            raise SchemaError(f"{path}:{i}: expected 10 fields, got {len(parts)}")
        targets.add(parts[0])
        try:
            n_pts = int(parts[1])
        except ValueError:
            raise SchemaError(f"{path}:{i}: N must be an integer") from None
        if n_pts < 2:
            raise SchemaError(f"{path}:{i}: N must be at least 2")
        value = _float(path, i, parts[4])
        if value <= 0:
            raise SchemaError(f"{path}:{i}: value must be positive on a log axis")
        if parts[9] not in ("true", "false"):
            raise SchemaError(f"{path}:{i}: in_band must be true or false")
        fits.add(tuple(parts[5:10]))
        ns.append(n_pts)
        values.append(value)
    if len(targets) != 1:
        raise SchemaError(f"{path}: expected one target, found {sorted(targets)}")
    if len(fits) != 1:
        raise SchemaError(f"{path}: fit columns are not constant across rows")
    fit = next(iter(fits))
    return ScalingReport(
        target=next(iter(targets)),
        N=np.array(ns),
        value=np.array(values),
        slope=_float(path, 0, fit[0]),
        intercept=_float(path, 0, fit[1]),
        band_lo=_float(path, 0, fit[2]),
        band_hi=_float(path, 0, fit[3]),
        in_band=fit[4] == "true",
    )


def save_atomic(fig, out: str | Path, raster: bool) -> None:
    """Render to a sibling temp file, then move into place.

    A failed render leaves no file at the destination.
    """
    out = Path(out)
    fmt = "png" if raster else "svg"
    tmp = out.with_name(f".{out.name}.tmp-{os.getpid()}")
    try:
        fig.savefig(tmp, format=fmt)
        os.replace(tmp, out)
    finally:
        tmp.unlink(missing_ok=True)
