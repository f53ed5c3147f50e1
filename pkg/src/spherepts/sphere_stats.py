"""Local statistics of finite point sets on unit spheres.

Pair counts use strict inequality |P_i - P_j| < r throughout.  For point sets
projected from integer solution sets, thresholds are decided by exact integer
comparison: with r^2 = p/q, a pair at dot value t is inside iff
q(2n - 2t) < p n and t <= n - 1, so rational thresholds can never tie.

Nearest-neighbour search is brute force up to N = 2000 and KD-tree above; the
tree only nominates the neighbour index, distances are recomputed with the
same vector arithmetic (integer arithmetic for arithmetic sets), so both
routes return identical values.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from . import config
from .errors import BudgetError, CoincidentPointsError, EmptySetError
from .lattice import PairCorrelationTable, UnitPointSet, pair_correlation

_ENERGY_CHUNK = 512  # fixed so the compensated sum is bit-stable per configuration
_BLOCK = 16_000_000


def _cfg() -> dict:
    return config.load_defaults()


# ---------------------------------------------------------------------------
# cap volumes


def cap_fraction(k: int, r: float) -> float:
    """Relative measure of a spherical cap of chord radius r on S^k, k in {2,3}.

    On S^2 the fraction is exactly r^2/4; on S^3 it is (theta - sin theta
    cos theta)/pi with theta = 2 arcsin(r/2), which behaves like
    (2/(3 pi)) r^3 for small r.
    """
    if not 0.0 <= r <= 2.0:
        raise ValueError("chord radius must lie in [0, 2]")
    if k == 2:
        return r * r / 4.0
    if k == 3:
        theta = 2.0 * math.asin(r / 2.0)
        return (theta - math.sin(theta) * math.cos(theta)) / math.pi
    raise ValueError("cap_fraction is defined for k = 2 or 3")


def _arc_fraction(r: float) -> float:
    # S^1 analogue, used only to normalize circle profiles
    return 2.0 * math.asin(r / 2.0) / math.pi


# ---------------------------------------------------------------------------
# Ripley-style pair counts


@dataclass(frozen=True)
class RipleyProfile:
    """Ordered-pair counts below each chord threshold, with the random-law
    normalization: counts / (N^2 r^2 / 4) on S^2, counts / (N(N-1) V(r)) on
    S^3 (arc fraction on S^1)."""

    k: int
    N: int
    thresholds: tuple[float, ...]
    counts: tuple[int, ...]
    normalized: tuple[float, ...]


def _normalizer(k: int, N: int, r: float) -> float:
    if k == 2:
        return N * N * r * r / 4.0
    if k == 3:
        return N * (N - 1) * cap_fraction(3, r)
    return N * (N - 1) * _arc_fraction(r)


def _exact_pair_count(table: PairCorrelationTable, r_squared: Fraction) -> int:
    """#{x != y : |x^ - y^| < r} through the identity with A(n, t)."""
    n = table.n
    p, q = r_squared.numerator, r_squared.denominator
    # q(2n - 2t) < p n  <=>  t > n(2q - p) / (2q)
    t_min = (n * (2 * q - p)) // (2 * q) + 1
    return table.tail_count(t_min, n - 1)


def _geometric_pair_counts(pts: np.ndarray, r_sq: np.ndarray) -> np.ndarray:
    """Strict ordered-pair counts below each threshold, diagonal excluded."""
    n_pts = pts.shape[0]
    counts = np.zeros(len(r_sq), dtype=np.int64)
    chunk = max(1, _BLOCK // max(1, n_pts))
    for lo in range(0, n_pts, chunk):
        block = pts[lo : lo + chunk]
        d2 = np.einsum("ik,jk->ij", block, pts) * -2.0
        d2 += np.einsum("ik,ik->i", block, block)[:, None]
        d2 += np.einsum("ik,ik->i", pts, pts)[None, :]
        rows = np.arange(block.shape[0])
        d2[rows, rows + lo] = np.inf
        for i, rs in enumerate(r_sq):
            counts[i] += int((d2 < rs).sum())
    return counts


def ripley(
    points: UnitPointSet,
    thresholds,
    method: str = "auto",
    budget: int | None = None,
) -> RipleyProfile:
    """K_r = #{ordered pairs i != j with |P_i - P_j| < r} for each threshold.

    method "integer" uses the exact A(n, t) identity (arithmetic sets only);
    "geometric" counts float pairwise distances; "auto" picks the integer
    route when the integer source is attached.
    """
    rs = list(thresholds)
    if not rs:
        raise ValueError("no thresholds given")
    for r in rs:
        if not 0 < float(r) <= 2.0:
            raise ValueError("thresholds must lie in (0, 2]")
    limit = budget if budget is not None else _cfg()["pair_budget"]
    if points.N * points.N > limit:
        raise BudgetError(f"N^2 = {points.N**2} pairs exceeds the pair budget {limit}")
    if method == "auto":
        method = "integer" if points.source is not None else "geometric"
    if method == "integer":
        if points.source is None:
            raise ValueError("integer method needs an arithmetic set with its source")
        table = pair_correlation(points.source, budget=limit)
        counts = [_exact_pair_count(table, Fraction(r) ** 2) for r in rs]
    elif method == "geometric":
        counts = _geometric_pair_counts(
            points.points, np.array([float(r) ** 2 for r in rs])
        ).tolist()
    else:
        raise ValueError(f"unknown method {method!r}")
    rs_f = [float(r) for r in rs]
    normalized = [c / _normalizer(points.k, points.N, r) for c, r in zip(counts, rs_f)]
    return RipleyProfile(
        k=points.k,
        N=points.N,
        thresholds=tuple(rs_f),
        counts=tuple(int(c) for c in counts),
        normalized=tuple(normalized),
    )


# ---------------------------------------------------------------------------
# nearest neighbours


def _chunked_sq_dists(block: np.ndarray, pts: np.ndarray) -> np.ndarray:
    diff = block[:, None, :] - pts[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _nn_indices_brute(pts: np.ndarray) -> np.ndarray:
    n_pts = pts.shape[0]
    out = np.empty(n_pts, dtype=np.int64)
    chunk = max(1, _BLOCK // (4 * max(1, n_pts)))
    for lo in range(0, n_pts, chunk):
        d2 = _chunked_sq_dists(pts[lo : lo + chunk], pts)
        rows = np.arange(d2.shape[0])
        d2[rows, rows + lo] = np.inf
        out[lo : lo + chunk] = np.argmin(d2, axis=1)
    return out


def nn_distances(points: UnitPointSet) -> np.ndarray:
    """Distance from each point to its nearest distinct neighbour.

    Brute force for N <= 2000, KD-tree above; both routes nominate an index
    and share the distance arithmetic, so they agree exactly.  For arithmetic
    sets the squared distance is evaluated in integers, which also makes any
    equidistant-neighbour tie irrelevant.
    """
    if points.N < 2:
        raise EmptySetError("nearest neighbours need at least two points")
    pts = points.points
    if points.N <= 2000:
        nbr = _nn_indices_brute(pts)
    else:
        _, idx = cKDTree(pts).query(pts, k=2, workers=-1)
        nbr = idx[:, 1].astype(np.int64)
    if points.source is not None:
        ipts = points.source.points
        diff = ipts - ipts[nbr]
        d2 = np.einsum("ij,ij->i", diff, diff)  # exact int64
        return np.sqrt(d2.astype(np.float64) / points.source.n)
    diff = pts - pts[nbr]
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def min_spacing(points: UnitPointSet) -> float:
    """Smallest pairwise distance in the set."""
    return float(np.min(nn_distances(points)))


# ---------------------------------------------------------------------------
# spacing measure


@dataclass(frozen=True)
class SpacingMeasure:
    """Empirical measure of (N/4) d_j^2 over nearest-neighbour distances d_j.

    masses has one entry per bin plus a trailing overflow bin; the masses sum
    to 1.
    """

    N: int
    raw: np.ndarray = field(repr=False)
    bin_edges: np.ndarray = field(repr=False)
    masses: np.ndarray = field(repr=False)

    def mean(self) -> float:
        return float(np.mean(self.raw))


def spacing_measure(
    points: UnitPointSet, num_bins: int | None = None, max_value: float | None = None
) -> SpacingMeasure:
    cfg = _cfg()
    num_bins = cfg["histogram_bins"] if num_bins is None else num_bins
    max_value = cfg["histogram_max"] if max_value is None else max_value
    d = nn_distances(points)
    raw = (points.N / 4.0) * d * d
    edges = np.linspace(0.0, max_value, num_bins + 1)
    counts, _ = np.histogram(raw, bins=edges)
    overflow = points.N - int(counts.sum())
    masses = np.append(counts, overflow) / points.N
    return SpacingMeasure(N=points.N, raw=raw, bin_edges=edges, masses=masses)


def ks_exponential(values: np.ndarray) -> float:
    """Kolmogorov-Smirnov distance of a sample to the unit exponential law."""
    x = np.sort(np.asarray(values, dtype=np.float64))
    n_pts = len(x)
    cdf = 1.0 - np.exp(-x)
    grid = np.arange(1, n_pts + 1) / n_pts
    return float(max(np.max(grid - cdf), np.max(cdf - (grid - 1.0 / n_pts))))


# ---------------------------------------------------------------------------
# electrostatic energy


def energy(points: UnitPointSet) -> float:
    """sum over ordered pairs i != j of 1/|P_i - P_j|.

    Chunked with a fixed block size and combined with exact summation of the
    block totals, so the value is bit-stable for a given configuration.
    Raises CoincidentPointsError if two points coincide.
    """
    pts = points.points
    block_sums = []
    # chunk depends only on N, so results are reproducible per configuration
    chunk = max(1, min(_ENERGY_CHUNK, _BLOCK // (4 * points.N)))
    for lo in range(0, points.N, chunk):
        d2 = _chunked_sq_dists(pts[lo : lo + chunk], pts)
        rows = np.arange(d2.shape[0])
        d2[rows, rows + lo] = np.inf
        if np.any(d2 == 0.0):
            raise CoincidentPointsError("coincident points give infinite energy")
        block_sums.append(float(np.sum(1.0 / np.sqrt(d2))))
    return math.fsum(block_sums)


def energy_deviation(points: UnitPointSet) -> float:
    """energy minus the exact random-law mean N(N-1)."""
    return energy(points) - points.N * (points.N - 1)


# ---------------------------------------------------------------------------
# covering radius


def _ring_points(axis_cos, axis_sin, counts):
    """Latitude rings: for ring i, counts[i] angles at cos/sin given."""
    total = int(counts.sum())
    bid = np.repeat(np.arange(len(counts)), counts)
    starts = np.zeros(len(counts), dtype=np.int64)
    np.cumsum(counts[:-1], out=starts[1:])
    offs = np.arange(total, dtype=np.int64) - starts[bid]
    phi = (offs + 0.5) * (2.0 * np.pi) / counts[bid]
    return np.stack(
        [axis_sin[bid] * np.cos(phi), axis_sin[bid] * np.sin(phi), axis_cos[bid]], axis=1
    )


def _s2_ring_layout(mesh: float):
    m = int(np.ceil(np.pi / mesh))
    theta = (np.arange(m) + 0.5) * np.pi / m
    counts = np.maximum(1, np.ceil(2.0 * np.pi * np.sin(theta) / mesh)).astype(np.int64)
    return theta, counts


def probe_count(k: int, mesh: float) -> int:
    """Number of probe points the covering estimator will use."""
    if k == 1:
        return int(np.ceil(2.0 * np.pi / mesh))
    if k == 2:
        return int(_s2_ring_layout(mesh)[1].sum())
    if k == 3:
        total = 0
        for _, g in _s3_ring_layout(mesh):
            total += probe_count(2, g)
        return total
    raise ValueError("covering probes are defined for k in {1, 2, 3}")


def _s3_ring_layout(mesh: float):
    # meridian leg mesh/3, ring-sphere leg 2 mesh/3; certified total <= mesh
    a = mesh / 3.0
    m = int(np.ceil(np.pi / (2.0 * a)))
    psi = (np.arange(m) + 0.5) * np.pi / m
    for p in psi:
        g = min(np.pi, (2.0 * mesh / 3.0) / max(np.sin(p), 1e-12))
        yield p, g


def _iter_probes(k: int, mesh: float, batch: int = 1 << 20):
    """Probe batches whose chordal covering radius of the sphere is <= mesh.

    The bound is the triangle inequality along a meridian to the nearest ring
    and then along the ring, both legs geodesic and each at most half the
    budget; chords are shorter than geodesics.
    """
    if k == 1:
        m = int(np.ceil(2.0 * np.pi / mesh))
        ang = (np.arange(m) + 0.5) * 2.0 * np.pi / m
        yield np.stack([np.cos(ang), np.sin(ang)], axis=1)
        return
    if k == 2:
        theta, counts = _s2_ring_layout(mesh)
        lo = 0
        cum = np.cumsum(counts)
        while lo < len(counts):
            hi = int(np.searchsorted(cum, (cum[lo - 1] if lo else 0) + batch)) + 1
            hi = min(hi, len(counts))
            yield _ring_points(np.cos(theta[lo:hi]), np.sin(theta[lo:hi]), counts[lo:hi])
            lo = hi
        return
    if k == 3:
        for p, g in _s3_ring_layout(mesh):
            for sub in _iter_probes(2, g, batch):
                block = np.empty((len(sub), 4))
                block[:, 0] = np.cos(p)
                block[:, 1:] = np.sin(p) * sub
                yield block
        return
    raise ValueError("covering probes are defined for k in {1, 2, 3}")


def covering_radius(
    points: UnitPointSet, mesh: float | None = None, probe_budget: int | None = None
) -> tuple[float, float]:
    """(estimate, error bound): max over probes of the distance to the set.

    The probe grid covers the sphere within mesh, so the true covering radius
    M satisfies estimate <= M <= estimate + mesh.
    """
    cfg = _cfg()
    if mesh is None:
        mesh = cfg["covering_mesh_s2"] if points.k == 2 else cfg["covering_mesh_s3"]
    if mesh <= 0:
        raise ValueError("mesh must be positive")
    budget = probe_budget if probe_budget is not None else cfg["covering_probe_budget"]
    total = probe_count(points.k, mesh)
    if total > budget:
        raise BudgetError(f"mesh {mesh} needs {total} probes, over the budget {budget}")
    tree = cKDTree(points.points)
    worst = 0.0
    for block in _iter_probes(points.k, mesh):
        d, _ = tree.query(block, k=1, workers=-1)
        worst = max(worst, float(np.max(d)))
    return worst, float(mesh)


def pole_annulus_gap(points: UnitPointSet) -> float:
    """Certified covering lower bound for arithmetic sets on S^3.

    Every point's distance to the pole e_1 is r(a) = sqrt(2 - 2 a/sqrt(n))
    for an integer first coordinate a, so the realized r values are a finite
    set; half the largest gap between consecutive realized values (with 0 and
    2 as virtual endpoints) is a distance some annulus midpoint keeps from
    every point of the set.
    """
    if points.k != 3 or points.source is None:
        raise ValueError("pole_annulus_gap needs an arithmetic set on S^3")
    n = points.source.n
    a = np.unique(points.source.points[:, 0]).astype(np.float64)
    r = np.sqrt(np.maximum(0.0, 2.0 - 2.0 * a / math.sqrt(n)))
    vals = np.sort(np.concatenate([[0.0], r, [2.0]]))
    return float(np.max(np.diff(vals)) / 2.0)


# ---------------------------------------------------------------------------
# cap discrepancy


def cap_discrepancy(points: UnitPointSet, num_caps: int | None = None, seed: int = 0) -> float:
    """max over sampled caps of |empirical fraction - cap_fraction|.

    Caps have uniform random centers and chord radii uniform on [0, 2];
    membership is the strict test <P, c> > 1 - r^2/2.
    """
    if points.k not in (2, 3):
        raise ValueError("cap discrepancy is defined on S^2 and S^3")
    num_caps = _cfg()["discrepancy_caps"] if num_caps is None else num_caps
    rng = np.random.Generator(np.random.PCG64(seed))
    centers = rng.standard_normal((num_caps, points.k + 1))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    radii = rng.uniform(0.0, 2.0, num_caps)
    expected = np.array([cap_fraction(points.k, r) for r in radii])
    worst = 0.0
    chunk = max(1, _BLOCK // max(1, points.N))
    for lo in range(0, num_caps, chunk):
        dots = points.points @ centers[lo : lo + chunk].T
        frac = np.mean(dots > 1.0 - radii[lo : lo + chunk] ** 2 / 2.0, axis=0)
        worst = max(worst, float(np.max(np.abs(frac - expected[lo : lo + chunk]))))
    return worst


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class StatsReport:
    """Bundle of computed statistics for one point set; None means not asked."""

    kind: str
    k: int
    N: int
    n: int | None = None
    seed: int | None = None
    energy: float | None = None
    energy_deviation: float | None = None
    ripley: RipleyProfile | None = None
    spacing: SpacingMeasure | None = None
    min_spacing: float | None = None
    covering_radius_estimate: float | None = None
    covering_radius_bound: float | None = None
    discrepancy_estimate: float | None = None

    def as_tree(self) -> dict:
        tree: dict = {
            "kind": self.kind,
            "k": self.k,
            "N": self.N,
            "n": self.n,
            "seed": self.seed,
            "energy": self.energy,
            "energy_deviation": self.energy_deviation,
            "ripley": None,
            "spacing": None,
            "min_spacing": self.min_spacing,
            "covering_radius_estimate": self.covering_radius_estimate,
            "covering_radius_bound": self.covering_radius_bound,
            "discrepancy_estimate": self.discrepancy_estimate,
        }
        if self.ripley is not None:
            tree["ripley"] = {
                "k": self.ripley.k,
                "N": self.ripley.N,
                "thresholds": list(self.ripley.thresholds),
                "counts": list(self.ripley.counts),
                "normalized": list(self.ripley.normalized),
            }
        if self.spacing is not None:
            # raw values stay out of the report; the CSV writer carries the bins
            tree["spacing"] = {
                "N": self.spacing.N,
                "mean": self.spacing.mean(),
                "ks_exponential": ks_exponential(self.spacing.raw),
                "bin_edges": self.spacing.bin_edges.tolist(),
                "masses": self.spacing.masses.tolist(),
            }
        return tree

    def to_json(self) -> str:
        return emit_json(self.as_tree())


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError("reports must not contain non-finite floats")
    return format(x, ".17g")


def emit_json(tree, indent: int = 0) -> str:
    """Deterministic JSON with floats at 17 significant digits."""
    pad = "  " * indent
    if tree is None:
        return "null"
    if tree is True or tree is False:
        return "true" if tree else "false"
    if isinstance(tree, (int, np.integer)):
        return str(int(tree))
    if isinstance(tree, (float, np.floating)):
        return _fmt_float(float(tree))
    if isinstance(tree, str):
        return json.dumps(tree)
    if isinstance(tree, dict):
        inner = ",\n".join(
            f'{pad}  "{key}": {emit_json(val, indent + 1)}' for key, val in tree.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(tree, (list, tuple)):
        return "[" + ", ".join(emit_json(v, indent) for v in tree) + "]"
    raise TypeError(f"cannot serialize {type(tree)}")


def write_spacing_csv(path: str | Path, sm: SpacingMeasure) -> None:
    """Histogram rows bin_left,bin_right,mass; the last row is the overflow
    bin with right edge inf."""
    lines = ["bin_left,bin_right,mass"]
    edges = sm.bin_edges
    for i in range(len(edges) - 1):
        lines.append(f"{_fmt_float(edges[i])},{_fmt_float(edges[i + 1])},{_fmt_float(sm.masses[i])}")
    lines.append(f"{_fmt_float(edges[-1])},inf,{_fmt_float(sm.masses[-1])}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_ripley_csv(path: str | Path, profile: RipleyProfile) -> None:
    lines = ["r,count,normalized"]
    for r, c, v in zip(profile.thresholds, profile.counts, profile.normalized):
        lines.append(f"{_fmt_float(r)},{c},{_fmt_float(v)}")
    Path(path).write_text("\n".join(lines) + "\n")
