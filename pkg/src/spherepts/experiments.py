"""Reproduction recipes behind the CLI subcommands.

Each cmd_* function takes plain typed arguments plus the merged config dict
and performs one experiment end to end: compute, write data files, print a
summary to standard output.  Argument parsing, logging and exit codes live in
the cli module.  All randomness is seeded and every output is byte
deterministic at a fixed thread count.
"""

from __future__ import annotations

import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import baselines, lattice, numtheory, sphere_stats
from .errors import BudgetError, EmptySetError
from .lattice import SolutionSet, UnitPointSet
from .sphere_stats import _exact_pair_count, _fmt_float, emit_json

TABLE1_N_VALUES = (104773, 104761, 1299763)

SCALING_TARGETS = (
    "min_spacing_S2",
    "min_spacing_S3",
    "covering_S3",
    "min_spacing_arith_S3",
    "covering_arith_S3",
)


def _enum_budget(cfg: dict, dim: int) -> int:
    return cfg[f"enum_budget_dim{dim}"]


def _emit(out: str | Path | None, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------------------
# enumerate


def cmd_enumerate(n: int, dim: int, out_path: str | Path, cfg: dict) -> None:
    """Write the canonical point-set CSV and print a one-line summary.

    A non-representable n yields a file with zero rows and N=0 in the summary.
    """
    sols = lattice.enumerate_solutions(n, dim, budget=_enum_budget(cfg, dim))
    lattice.write_point_set(out_path, sols)
    sf = "true" if numtheory.is_squarefree(n) else "false"
    sys.stdout.write(f"n={n} dim={dim} N={sols.N} n_mod_8={n % 8} squarefree={sf}\n")


# ---------------------------------------------------------------------------
# stats


def _load_points(
    cfg: dict,
    n: int | None,
    dim: int,
    in_path: str | Path | None,
    random_n: int | None,
    k: int,
    seed: int | None,
) -> UnitPointSet:
    """Resolve the one input mode (arithmetic n, point-set file, random N)."""
    modes = sum(v is not None for v in (n, in_path, random_n))
    if modes != 1:
        raise ValueError("give exactly one of an integer n, an input file, or a random size")
    if n is not None:
        sols = lattice.enumerate_solutions(n, dim, budget=_enum_budget(cfg, dim))
        return lattice.project_to_sphere(sols)
    if in_path is not None:
        return lattice.project_to_sphere(lattice.read_point_set(in_path))
    seed = cfg["seed"] if seed is None else seed
    return baselines.sample_uniform_sphere(random_n, k, seed)


def cmd_stats(
    cfg: dict,
    *,
    n: int | None = None,
    dim: int = 3,
    in_path: str | Path | None = None,
    random_n: int | None = None,
    k: int = 2,
    seed: int | None = None,
    do_energy: bool = False,
    ripley_thresholds: list[float] | None = None,
    do_spacing: bool = False,
    do_min_spacing: bool = False,
    do_covering: bool = False,
    mesh: float | None = None,
    do_discrepancy: bool = False,
    num_caps: int | None = None,
    out: str | Path | None = None,
    spacing_csv: str | Path | None = None,
    ripley_csv: str | Path | None = None,
    force: bool = False,
) -> sphere_stats.StatsReport:
    """Compute the requested statistics for one point set; JSON report out."""
    points = _load_points(cfg, n, dim, in_path, random_n, k, seed)
    pair_budget = (1 << 62) if force else cfg["pair_budget"]
    npts = points.N

    e = e_dev = None
    if do_energy:
        if not force and npts * (npts - 1) > cfg["energy_pair_budget"]:
            raise BudgetError(
                f"energy needs {npts * (npts - 1)} ordered pairs, over the budget "
                f"{cfg['energy_pair_budget']}; pass --force to run anyway"
            )
        e = sphere_stats.energy(points)
        e_dev = e - npts * (npts - 1)

    profile = None
    if ripley_thresholds:
        profile = sphere_stats.ripley(points, ripley_thresholds, budget=pair_budget)
        if ripley_csv is not None:
            sphere_stats.write_ripley_csv(ripley_csv, profile)

    spacing = None
    if do_spacing and npts >= 2:
        spacing = sphere_stats.spacing_measure(
            points, num_bins=cfg["histogram_bins"], max_value=cfg["histogram_max"]
        )
        if spacing_csv is not None:
            sphere_stats.write_spacing_csv(spacing_csv, spacing)

    m = None
    if do_min_spacing and npts >= 2:
        m = sphere_stats.min_spacing(points)

    cov = cov_bound = None
    if do_covering:
        budget = (1 << 62) if force else cfg["covering_probe_budget"]
        if mesh is None:
            mesh = cfg["covering_mesh_s2"] if points.k == 2 else cfg["covering_mesh_s3"]
        cov, used_mesh = sphere_stats.covering_radius(points, mesh=mesh, probe_budget=budget)
        cov_bound = cov + used_mesh

    disc = None
    if do_discrepancy:
        disc = sphere_stats.cap_discrepancy(
            points, num_caps=num_caps if num_caps is not None else cfg["discrepancy_caps"]
        )

    report = sphere_stats.StatsReport(
        kind=points.provenance.kind,
        k=points.k,
        N=npts,
        n=points.source.n if points.source is not None else None,
        seed=points.provenance.seed,
        energy=e,
        energy_deviation=e_dev,
        ripley=profile,
        spacing=spacing,
        min_spacing=m,
        covering_radius_estimate=cov,
        covering_radius_bound=cov_bound,
        discrepancy_estimate=disc,
    )
    _emit(out, report.to_json() + "\n")
    return report


# ---------------------------------------------------------------------------
# table 1


def cmd_table1(
    cfg: dict,
    out: str | Path | None = None,
    runs: int | None = None,
    seed: int | None = None,
) -> list[dict]:
    """Energy deviation E - N(N-1): exact integer sets vs seeded random means."""
    runs = cfg["mc_runs"] if runs is None else runs
    seed = cfg["seed"] if seed is None else seed
    rows = []
    for n in TABLE1_N_VALUES:
        sols = lattice.enumerate_solutions(n, 3, budget=_enum_budget(cfg, 3))
        points = lattice.project_to_sphere(sols)
        integer = sphere_stats.energy_deviation(points)
        mc = baselines.monte_carlo("energy_deviation", points.N, 2, runs, seed)
        rows.append(
            {
                "n": n,
                "N": points.N,
                "integer": integer,
                "random_mean": mc.mean,
                "random_std": mc.std,
            }
        )
    header = f"{'n':>9}  {'N':>6}  {'integer':>10}  {'random mean':>12}  {'random std':>11}"
    body = [header]
    for row in rows:
        std = "" if row["random_std"] is None else f"{row['random_std']:.1f}"
        body.append(
            f"{row['n']:>9}  {row['N']:>6}  {round(row['integer']):>10}  "
            f"{row['random_mean']:>12.1f}  {std:>11}"
        )
    body.append(f"(random column: mean of {runs} runs at seed {seed})")
    sys.stdout.write("\n".join(body) + "\n")
    if out is not None:
        lines = ["n,N,integer,random_mean,random_std"]
        for row in rows:
            std = "" if row["random_std"] is None else _fmt_float(row["random_std"])
            lines.append(
                f"{row['n']},{row['N']},{_fmt_float(row['integer'])},"
                f"{_fmt_float(row['random_mean'])},{std}"
            )
        Path(out).write_text("\n".join(lines) + "\n")
    return rows


# ---------------------------------------------------------------------------
# ensemble


@dataclass(frozen=True)
class EnsembleRow:
    """Per-n pair-count statistics at the scale-coupled radius r = n^(delta-1/2)."""

    n: int
    N: int
    squarefree: bool
    n_mod_8: int
    r: float
    khat: int
    khat_normalized: float
    khat_deviation: float
    min_spacing: float
    min_spacing_sqrt_n: float


ENSEMBLE_HEADER = (
    "n,N,squarefree,n_mod_8,r,khat,khat_normalized,khat_deviation,"
    "min_spacing,min_spacing_sqrt_n"
)


def _ensemble_row(
    n: int, sols: SolutionSet, delta: float, squarefree: bool, pair_budget: int
) -> EnsembleRow:
    table = lattice.pair_correlation(sols, budget=pair_budget)
    r = n ** (delta - 0.5)
    khat = _exact_pair_count(table, Fraction(r) ** 2)
    norm = sols.N**2 * r * r / 4.0
    # largest off-diagonal inner product gives the realized minimum spacing
    t_second = int(table.t_values[-2])
    m_sqrt_n = math.sqrt(2 * n - 2 * t_second)
    return EnsembleRow(
        n=n,
        N=sols.N,
        squarefree=squarefree,
        n_mod_8=n % 8,
        r=r,
        khat=khat,
        khat_normalized=khat / norm,
        khat_deviation=khat - norm,
        min_spacing=m_sqrt_n / math.sqrt(n),
        min_spacing_sqrt_n=m_sqrt_n,
    )


def _row_csv(row: EnsembleRow) -> str:
    return ",".join(
        [
            str(row.n),
            str(row.N),
            "true" if row.squarefree else "false",
            str(row.n_mod_8),
            _fmt_float(row.r),
            str(row.khat),
            _fmt_float(row.khat_normalized),
            _fmt_float(row.khat_deviation),
            _fmt_float(row.min_spacing),
            _fmt_float(row.min_spacing_sqrt_n),
        ]
    )


def _ensemble_task(args: tuple) -> tuple[EnsembleRow, tuple[int, ...]] | None:
    """One n of the sweep: None when filtered out or not representable."""
    n, delta, squarefree_only, exclude_mod8, shifts, enum_budget, pair_budget = args
    if n % 8 in exclude_mod8:
        return None
    squarefree = numtheory.is_squarefree(n)
    if squarefree_only and not squarefree:
        return None
    sols = lattice.enumerate_solutions(n, 3, budget=enum_budget)
    if sols.N == 0:
        return None
    shift_counts = tuple(lattice.shifted_count(sols, h) for h in shifts)
    return _ensemble_row(n, sols, delta, squarefree, pair_budget), shift_counts


def cmd_ensemble(
    cfg: dict,
    n_min: int,
    n_max: int,
    delta: float | None = None,
    squarefree_only: bool = False,
    exclude_mod8: tuple[int, ...] = (),
    shifts: tuple[tuple[int, int, int], ...] = (),
    out: str | Path | None = None,
) -> dict:
    """Sweep n over [n_min, n_max]: per-n pair counts at r = n^(delta-1/2).

    Rows cover representable n passing the filters; the same filters apply to
    the shifted-count totals.  Distinct n are independent, so they run on a
    process pool; the ordered map keeps emission sorted by n and the output
    byte-identical for any worker count.  Rows go to `out` as CSV; the
    summary JSON goes to standard output.
    """
    delta = cfg["ensemble_delta"] if delta is None else delta
    if not 0.0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 0.5)")
    for h in shifts:
        if len(h) != 3 or all(v == 0 for v in h):
            raise ValueError("shifts must be nonzero length-3 integer vectors")
    rows: list[EnsembleRow] = []
    shift_totals = {h: 0 for h in shifts}
    tasks = (
        (
            n,
            delta,
            squarefree_only,
            tuple(exclude_mod8),
            tuple(shifts),
            _enum_budget(cfg, 3),
            cfg["pair_budget"],
        )
        for n in range(max(1, n_min), n_max + 1)
    )
    sink = open(out, "w") if out is not None else None
    try:
        if sink is not None:
            sink.write(ENSEMBLE_HEADER + "\n")
        with ProcessPoolExecutor(max_workers=os.cpu_count() or 1) as pool:
            for result in pool.map(_ensemble_task, tasks, chunksize=64):
                if result is None:
                    continue
                row, shift_counts = result
                for h, c in zip(shifts, shift_counts):
                    shift_totals[h] += c
                rows.append(row)
                if sink is not None:
                    sink.write(_row_csv(row) + "\n")
    finally:
        if sink is not None:
            sink.close()

    deviations = np.array([row.khat_deviation for row in rows])
    normalized = np.array([row.khat_normalized for row in rows])
    lo, hi = cfg["ensemble_median_lo"], cfg["ensemble_median_hi"]
    count = len(rows)
    summary = {
        "n_min": n_min,
        "n_max": n_max,
        "delta": delta,
        "r_rule": "n^(delta - 1/2)",
        "squarefree_only": squarefree_only,
        "exclude_mod8": list(exclude_mod8),
        "rows": count,
        "khat_deviation_mean": float(deviations.mean()) if count else None,
        "khat_deviation_std": float(deviations.std(ddof=1)) if count > 1 else None,
        "khat_deviation_mean_over_std": (
            float(deviations.mean() / deviations.std(ddof=1))
            if count > 1 and deviations.std(ddof=1) > 0
            else None
        ),
        "khat_normalized_median": float(np.median(normalized)) if count else None,
        "band_lo": lo,
        "band_hi": hi,
        "fraction_in_band": (
            float(np.mean((normalized >= lo) & (normalized <= hi))) if count else None
        ),
        "shift_totals": {",".join(map(str, h)): total for h, total in shift_totals.items()},
    }
    sys.stdout.write(emit_json(summary) + "\n")
    return summary


# ---------------------------------------------------------------------------
# scaling


def _scaling_band(cfg: dict, target: str) -> tuple[float, float]:
    key = target.lower()
    return cfg[f"slope_lo_{key}"], cfg[f"slope_hi_{key}"]


def _random_scaling_rows(cfg: dict, target: str, seed: int) -> list[dict]:
    k = 2 if target.endswith("S2") else 3
    size_hi = cfg["covering_size_hi"] if target.startswith("covering") else cfg["scaling_size_hi"]
    runs = cfg["covering_seeds"] if target.startswith("covering") else cfg["scaling_seeds"]
    rows = []
    counter = 0
    for j in range(cfg["scaling_size_lo"], size_hi + 1):
        n_pts = 1 << j
        for _ in range(runs):
            s = baselines.run_seed(seed, counter)
            counter += 1
            pts = baselines.sample_uniform_sphere(n_pts, k, s)
            if target.startswith("covering"):
                # mesh proportional to the expected radius keeps the probe
                # bias a constant factor, so the log-log slope is unbiased
                mesh = cfg["covering_mesh_coeff"] * n_pts ** (-1.0 / 3.0)
                value = sphere_stats.covering_radius(
                    pts, mesh=mesh, probe_budget=cfg["covering_probe_budget"]
                )[0]
            else:
                value = sphere_stats.min_spacing(pts)
            rows.append({"N": n_pts, "seed": s, "n": None, "value": value})
    return rows


def _arith_scaling_rows(cfg: dict, target: str) -> list[dict]:
    offsets = [int(v) for v in str(cfg["arith_grid_offsets"]).split(",")]
    j_hi = cfg["arith_gap_grid_hi"] if target.startswith("covering") else cfg["arith_grid_hi"]
    rows = []
    for j in range(cfg["arith_grid_lo"], j_hi + 1):
        for off in offsets:
            n = (1 << j) + off
            sols = lattice.enumerate_solutions(n, 4, budget=_enum_budget(cfg, 4))
            if sols.N == 0:
                continue
            pts = lattice.project_to_sphere(sols)
            if target.startswith("covering"):
                value = sphere_stats.pole_annulus_gap(pts)
            else:
                value = sphere_stats.min_spacing(pts)
            rows.append({"N": pts.N, "seed": None, "n": n, "value": value})
    return rows


def cmd_scaling(
    cfg: dict,
    target: str,
    seed: int | None = None,
    out: str | Path | None = None,
) -> dict:
    """Least-squares slope of log(statistic) against log(N) for one target."""
    if target not in SCALING_TARGETS:
        raise ValueError(f"unknown target {target!r}; have {SCALING_TARGETS}")
    seed = cfg["seed"] if seed is None else seed
    if "arith" in target:
        rows = _arith_scaling_rows(cfg, target)
    else:
        rows = _random_scaling_rows(cfg, target, seed)
    logs_n = np.log([row["N"] for row in rows])
    logs_v = np.log([row["value"] for row in rows])
    slope, intercept = np.polyfit(logs_n, logs_v, 1)
    lo, hi = _scaling_band(cfg, target)
    summary = {
        "target": target,
        "slope": float(slope),
        "intercept": float(intercept),
        "band_lo": lo,
        "band_hi": hi,
        "in_band": bool(lo <= slope <= hi),
        "points": len(rows),
    }
    if out is not None:
        lines = ["target,N,seed,n,value,slope,intercept,band_lo,band_hi,in_band"]
        for row in rows:
            lines.append(
                ",".join(
                    [
                        target,
                        str(row["N"]),
                        "" if row["seed"] is None else str(row["seed"]),
                        "" if row["n"] is None else str(row["n"]),
                        _fmt_float(row["value"]),
                        _fmt_float(float(slope)),
                        _fmt_float(float(intercept)),
                        _fmt_float(lo),
                        _fmt_float(hi),
                        "true" if summary["in_band"] else "false",
                    ]
                )
            )
        Path(out).write_text("\n".join(lines) + "\n")
    sys.stdout.write(emit_json(summary) + "\n")
    return summary


# ---------------------------------------------------------------------------
# figure data


def _write_patch_csv(path: Path, pts: np.ndarray) -> None:
    lines = ["x,y,z"]
    lines += [",".join(_fmt_float(v) for v in row) for row in pts.tolist()]
    path.write_text("\n".join(lines) + "\n")


def _cap_window(points: UnitPointSet, z_min: float) -> np.ndarray:
    return points.points[points.points[:, 2] >= z_min]


def cmd_fig_data(
    cfg: dict,
    which: str,
    out_dir: str | Path,
    seed: int | None = None,
) -> dict:
    """Emit the CSV bundle behind one figure; summary JSON to standard output."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seed = cfg["seed"] if seed is None else seed
    if which == "fig1":
        n = cfg["fig1_n"]
        sols = lattice.enumerate_solutions(n, 3, budget=_enum_budget(cfg, 3))
        arith = lattice.project_to_sphere(sols)
        frac = cfg["fig1_window_points"] / arith.N
        z_min = 1.0 - 2.0 * frac  # cap of area fraction f has height 2f
        random = baselines.sample_uniform_sphere(arith.N, 2, seed)
        rigid = baselines.hex_patch(arith.N, cap_fraction=frac)
        patches = {
            "arithmetic": _cap_window(arith, z_min),
            "random": _cap_window(random, z_min),
            "rigid": rigid.points,
        }
        counts = {}
        for name, pts in patches.items():
            window_n = pts.shape[0]
            if not cfg["fig1_window_lo"] <= window_n <= cfg["fig1_window_hi"]:
                raise ValueError(
                    f"{name} window holds {window_n} points, outside "
                    f"[{cfg['fig1_window_lo']}, {cfg['fig1_window_hi']}]"
                )
            _write_patch_csv(out / f"fig1_{name}.csv", pts)
            counts[name] = window_n
        summary = {
            "which": "fig1",
            "n": n,
            "N": arith.N,
            "window_fraction": frac,
            "counts": counts,
            "files": [f"fig1_{name}.csv" for name in patches],
        }
    elif which == "fig2":
        n = cfg["fig2_n"]
        sols = lattice.enumerate_solutions(n, 3, budget=_enum_budget(cfg, 3))
        pts = lattice.project_to_sphere(sols)
        spacing = sphere_stats.spacing_measure(
            pts, num_bins=cfg["histogram_bins"], max_value=cfg["histogram_max"]
        )
        sphere_stats.write_spacing_csv(out / "fig2_spacing.csv", spacing)
        xs = np.linspace(0.0, cfg["histogram_max"], cfg["fig2_curve_samples"])
        lines = ["s,density"]
        lines += [f"{_fmt_float(x)},{_fmt_float(math.exp(-x))}" for x in xs]
        (out / "fig2_curve.csv").write_text("\n".join(lines) + "\n")
        summary = {
            "which": "fig2",
            "n": n,
            "N": pts.N,
            "spacing_mean": spacing.mean(),
            "ks_exponential": sphere_stats.ks_exponential(spacing.raw),
            "files": ["fig2_spacing.csv", "fig2_curve.csv"],
        }
    else:
        raise ValueError(f"unknown figure {which!r}; have fig1, fig2")
    sys.stdout.write(emit_json(summary) + "\n")
    return summary


# ---------------------------------------------------------------------------
# baseline Monte Carlo


def cmd_baseline(
    cfg: dict,
    statistic: str,
    n_points: int,
    k: int,
    runs: int | None = None,
    seed: int | None = None,
    params: dict | None = None,
    out: str | Path | None = None,
) -> baselines.MonteCarloSummary:
    """Seeded Monte Carlo summary of one named statistic on random points."""
    runs = cfg["mc_runs"] if runs is None else runs
    seed = cfg["seed"] if seed is None else seed
    summary = baselines.monte_carlo(statistic, n_points, k, runs, seed, params=params)
    _emit(out, summary.to_json() + "\n")
    return summary
