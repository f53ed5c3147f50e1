"""Random and rigid reference configurations, and Monte Carlo driving.

Randomness comes from numpy's PCG64 generator (seedable, portable streams);
points on S^k are normalized standard normal vectors.  Monte Carlo runs use
per-run seeds derived from the master seed by the splitmix64 finalizer:
seed_i = mix64(master + (i + 1) * 0x9E3779B97F4A7C15), i.e. the splitmix64
stream started at the master seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import config, sphere_stats
from .lattice import Provenance, UnitPointSet

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(x: int) -> int:
    z = x & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def run_seed(master: int, index: int) -> int:
    """Per-run seed: splitmix64 stream at the master seed, step index + 1."""
    return _mix64((master + (index + 1) * _GOLDEN) & _MASK64)


def sample_uniform_sphere(n_points: int, k: int, seed: int) -> UnitPointSet:
    """n_points independent uniform points on S^k (normalized Gaussians)."""
    if n_points < 1:
        raise ValueError("need at least one point")
    if k not in (1, 2, 3):
        raise ValueError("k must be 1, 2 or 3")
    rng = np.random.Generator(np.random.PCG64(seed))
    pts = rng.standard_normal((n_points, k + 1))
    norms = np.linalg.norm(pts, axis=1)
    while np.any(norms < 1e-8):  # astronomically rare; resample degenerate rows
        bad = norms < 1e-8
        pts[bad] = rng.standard_normal((int(bad.sum()), k + 1))
        norms = np.linalg.norm(pts, axis=1)
    pts /= norms[:, None]
    return UnitPointSet(k=k, points=pts, provenance=Provenance("random", seed=seed))


def hex_patch(n_target: int, cap_fraction: float | None = None) -> UnitPointSet:
    """Triangular-lattice patch mapped onto a polar cap by the equal-area map.

    Spacing is set so the planar density matches n_target points per full
    sphere; the patch covers the cap holding cap_fraction of the sphere.  The
    Lambert azimuthal equal-area map sends planar radius rho to chord distance
    rho from the pole, so densities transfer exactly and local distortion is
    1/(1 - rho^2/4), about 1 percent at the default extent.
    """
    if n_target < 7:
        raise ValueError("n_target must be at least 7")
    frac = config.load_defaults()["hex_cap_fraction"] if cap_fraction is None else cap_fraction
    if not 0 < frac <= 0.5:
        raise ValueError("cap_fraction must lie in (0, 0.5]")
    spacing = math.sqrt(8.0 * math.pi / (math.sqrt(3.0) * n_target))
    radius = 2.0 * math.sqrt(frac)  # chord radius of the cap = planar radius
    reach = int(radius / spacing) + 2
    i, j = np.meshgrid(np.arange(-2 * reach, 2 * reach + 1), np.arange(-reach, reach + 1))
    u = (i + 0.5 * j).ravel() * spacing
    v = j.ravel() * (spacing * math.sqrt(3.0) / 2.0)
    rho2 = u * u + v * v
    keep = rho2 <= radius * radius
    u, v, rho2 = u[keep], v[keep], rho2[keep]
    scale = np.sqrt(1.0 - rho2 / 4.0)
    pts = np.stack([u * scale, v * scale, 1.0 - rho2 / 2.0], axis=1)
    prov = Provenance(
        "rigid", params=(("n_target", n_target), ("cap_fraction", frac), ("spacing", spacing))
    )
    return UnitPointSet(k=2, points=pts, provenance=prov)


# ---------------------------------------------------------------------------
# Monte Carlo


def _stat_ripley_count(points: UnitPointSet, r: float) -> float:
    return float(sphere_stats.ripley(points, [r]).counts[0])


def _stat_spacing_ks(points: UnitPointSet) -> float:
    return sphere_stats.ks_exponential(sphere_stats.spacing_measure(points).raw)


def _stat_spacing_mean(points: UnitPointSet) -> float:
    return sphere_stats.spacing_measure(points).mean()


def _stat_covering(points: UnitPointSet, mesh: float | None = None) -> float:
    return sphere_stats.covering_radius(points, mesh=mesh)[0]


def _stat_discrepancy(points: UnitPointSet, num_caps: int | None = None) -> float:
    # cap sample fixed across runs so only the points vary
    return sphere_stats.cap_discrepancy(points, num_caps=num_caps, seed=0)


STATISTICS = {
    "energy_deviation": sphere_stats.energy_deviation,
    "ripley_count": _stat_ripley_count,
    "min_spacing": sphere_stats.min_spacing,
    "covering_radius": _stat_covering,
    "spacing_ks": _stat_spacing_ks,
    "spacing_mean": _stat_spacing_mean,
    "cap_discrepancy": _stat_discrepancy,
}


@dataclass(frozen=True)
class MonteCarloSummary:
    """Per-run values and moments of one statistic over seeded random sets."""

    statistic: str
    params: tuple
    N: int
    k: int
    runs: int
    seed: int
    values: tuple[float, ...]
    mean: float
    std: float | None  # absent for a single run

    def as_tree(self) -> dict:
        return {
            "statistic": self.statistic,
            "params": dict(self.params),
            "N": self.N,
            "k": self.k,
            "runs": self.runs,
            "seed": self.seed,
            "values": list(self.values),
            "mean": self.mean,
            "std": self.std,
        }

    def to_json(self) -> str:
        return sphere_stats.emit_json(self.as_tree())


def monte_carlo(
    statistic: str,
    n_points: int,
    k: int,
    runs: int,
    seed: int,
    params: dict | None = None,
) -> MonteCarloSummary:
    """Evaluate a named statistic on `runs` independent uniform samples."""
    if statistic not in STATISTICS:
        raise ValueError(f"unknown statistic {statistic!r}; have {sorted(STATISTICS)}")
    if runs < 1:
        raise ValueError("need at least one run")
    params = params or {}
    fn = STATISTICS[statistic]
    values = []
    for i in range(runs):
        pts = sample_uniform_sphere(n_points, k, run_seed(seed, i))
        values.append(float(fn(pts, **params)))
    arr = np.asarray(values)
    return MonteCarloSummary(
        statistic=statistic,
        params=tuple(sorted(params.items())),
        N=n_points,
        k=k,
        runs=runs,
        seed=seed,
        values=tuple(values),
        mean=float(arr.mean()),
        std=float(arr.std(ddof=1)) if runs > 1 else None,
    )
