import json
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from spherepts import baselines, lattice, sphere_stats
from spherepts.errors import BudgetError, CoincidentPointsError, EmptySetError


def unit_set(rows, k=None):
    pts = np.asarray(rows, dtype=np.float64)
    k = pts.shape[1] - 1 if k is None else k
    return lattice.UnitPointSet(k=k, points=pts)


OCTAHEDRON = unit_set(
    [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]]
)


# cap geometry


def test_cap_fraction_s2_exact():
    for r in (0.0, 0.3, 1.0, math.sqrt(2), 2.0):
        assert sphere_stats.cap_fraction(2, r) == pytest.approx(r * r / 4.0, abs=0)


def test_cap_fraction_endpoints():
    for k in (2, 3):
        assert sphere_stats.cap_fraction(k, 0.0) == 0.0
        assert sphere_stats.cap_fraction(k, 2.0) == pytest.approx(1.0, abs=1e-15)
        # hemisphere: chord sqrt(2)
        assert sphere_stats.cap_fraction(k, math.sqrt(2)) == pytest.approx(0.5, abs=1e-15)


def test_cap_fraction_s3_against_quadrature():
    # area element on S^3 is proportional to sin^2(psi) d psi
    def frac(theta):
        num, _ = integrate.quad(lambda p: math.sin(p) ** 2, 0.0, theta)
        den, _ = integrate.quad(lambda p: math.sin(p) ** 2, 0.0, math.pi)
        return num / den

    for r in (0.05, 0.3, 0.8, 1.3, 1.9):
        theta = 2.0 * math.asin(r / 2.0)
        assert sphere_stats.cap_fraction(3, r) == pytest.approx(frac(theta), abs=1e-10)


def test_cap_fraction_s3_small_r_asymptotics():
    r = 1e-4
    assert sphere_stats.cap_fraction(3, r) == pytest.approx(
        2.0 / (3.0 * math.pi) * r**3, rel=1e-6
    )


def test_cap_fraction_rejects_bad_args():
    with pytest.raises(ValueError):
        sphere_stats.cap_fraction(2, -0.1)
    with pytest.raises(ValueError):
        sphere_stats.cap_fraction(2, 2.1)
    with pytest.raises(ValueError):
        sphere_stats.cap_fraction(4, 1.0)


# Ripley counts


def test_ripley_octahedron_strict_boundaries(enum):
    pts = lattice.project_to_sphere(enum(1, 3))
    # neighbours at sqrt(2), antipodes at 2; both thresholds sit on atoms
    prof = sphere_stats.ripley(pts, [1.4, 1.5, 2.0])
    assert prof.counts == (0, 24, 24)
    geo = sphere_stats.ripley(pts, [1.4, 1.5, 2.0], method="geometric")
    assert geo.counts == prof.counts


@pytest.mark.parametrize("n", [5, 90, 101, 1002])
def test_ripley_routes_agree(enum, n):
    pts = lattice.project_to_sphere(enum(n, 3))
    rs = [0.05, 0.2, 0.7, 1.1, 1.9]
    ints = sphere_stats.ripley(pts, rs, method="integer")
    geos = sphere_stats.ripley(pts, rs, method="geometric")
    assert ints.counts == geos.counts
    assert ints.thresholds == geos.thresholds
    auto = sphere_stats.ripley(pts, rs)
    assert auto.counts == ints.counts


def test_ripley_tie_free_thresholds_match_fraction_route(enum):
    # r^2 = odd/n can never equal a squared distance 2(n - t)/n
    n = 101
    pts = lattice.project_to_sphere(enum(n, 3))
    rs = [math.sqrt(m / n) for m in range(1, 40, 2)]
    table = lattice.pair_correlation(enum(n, 3))
    # squared distances step by 2/n, far beyond the float error of sqrt(m/n)
    exact_counts = [
        sphere_stats._exact_pair_count(table, Fraction(m, n)) for m in range(1, 40, 2)
    ]
    ints = sphere_stats.ripley(pts, rs, method="integer")
    geos = sphere_stats.ripley(pts, rs, method="geometric")
    assert list(ints.counts) == exact_counts
    assert list(geos.counts) == exact_counts


def test_ripley_normalization_random_law():
    pts = baselines.sample_uniform_sphere(20000, 2, seed=3)
    prof = sphere_stats.ripley(pts, [0.3])
    # expected ordered pairs ~ N^2 r^2 / 4, so normalized ~ 1
    assert prof.normalized[0] == pytest.approx(1.0, abs=0.05)
    assert prof.counts[0] == pytest.approx(prof.normalized[0] * 20000**2 * 0.09 / 4)


def test_ripley_validation_and_budget(enum):
    pts = lattice.project_to_sphere(enum(5, 3))
    with pytest.raises(ValueError):
        sphere_stats.ripley(pts, [])
    with pytest.raises(ValueError):
        sphere_stats.ripley(pts, [0.0])
    with pytest.raises(ValueError):
        sphere_stats.ripley(pts, [2.5])
    with pytest.raises(ValueError):
        sphere_stats.ripley(pts, [1.0], method="fancy")
    with pytest.raises(BudgetError):
        sphere_stats.ripley(pts, [1.0], budget=100)
    rand = baselines.sample_uniform_sphere(10, 2, seed=0)
    with pytest.raises(ValueError):
        sphere_stats.ripley(rand, [1.0], method="integer")


# nearest neighbours


def test_nn_octahedron():
    d = sphere_stats.nn_distances(OCTAHEDRON)
    assert np.allclose(d, math.sqrt(2))
    assert sphere_stats.min_spacing(OCTAHEDRON) == pytest.approx(math.sqrt(2), abs=1e-15)


def test_nn_brute_and_tree_agree_across_switch():
    # N = 2500 takes the KD-tree route; recompute with the brute kernel
    pts = baselines.sample_uniform_sphere(2500, 2, seed=11)
    via_api = sphere_stats.nn_distances(pts)
    nbr = sphere_stats._nn_indices_brute(pts.points)
    diff = pts.points - pts.points[nbr]
    brute = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    assert np.array_equal(via_api, brute)


def test_nn_integer_route_is_exact(enum):
    pts = lattice.project_to_sphere(enum(90, 3))
    d = sphere_stats.nn_distances(pts)
    # every squared distance is 2(n - t)/n for an integer t
    t = 90 - (d * d) * 90 / 2.0
    assert np.allclose(t, np.round(t), atol=1e-9)


def test_nn_needs_two_points():
    with pytest.raises(EmptySetError):
        sphere_stats.nn_distances(unit_set([[0.0, 0.0, 1.0]]))


# spacing measure and KS


def test_spacing_masses_sum_to_one():
    pts = baselines.sample_uniform_sphere(5000, 2, seed=5)
    sm = sphere_stats.spacing_measure(pts, num_bins=30, max_value=2.0)
    assert len(sm.masses) == 31
    assert sm.masses.sum() == pytest.approx(1.0, abs=1e-12)
    assert sm.masses[-1] > 0  # exponential tail beyond 2.0 must overflow
    assert len(sm.bin_edges) == 31


def test_spacing_scaling_convention():
    # (N/4) d^2 with every nearest neighbour at sqrt(2) and N = 6
    sm = sphere_stats.spacing_measure(OCTAHEDRON, num_bins=10, max_value=5.0)
    assert np.allclose(sm.raw, 6.0 / 4.0 * 2.0)
    assert sm.mean() == pytest.approx(3.0, abs=1e-12)


def test_ks_exponential_on_exact_grid():
    n = 4000
    grid = -np.log(1.0 - (np.arange(1, n + 1) - 0.5) / n)
    assert sphere_stats.ks_exponential(grid) == pytest.approx(0.5 / n, rel=1e-6)


def test_ks_exponential_rejects_wrong_law():
    rng = np.random.Generator(np.random.PCG64(7))
    assert sphere_stats.ks_exponential(rng.uniform(0.0, 1.0, 3000)) > 0.2


def test_ks_exponential_matches_naive_definition():
    rng = np.random.Generator(np.random.PCG64(9))
    x = rng.exponential(1.0, 500)
    got = sphere_stats.ks_exponential(x)
    xs = np.sort(x)
    worst = 0.0
    for i, v in enumerate(xs):
        cdf = 1.0 - math.exp(-v)
        worst = max(worst, abs((i + 1) / 500 - cdf), abs(i / 500 - cdf))
    assert got == pytest.approx(worst, abs=1e-15)


# energy


def test_energy_closed_forms(enum):
    assert sphere_stats.energy(OCTAHEDRON) == pytest.approx(12.0 * math.sqrt(2) + 3.0, rel=1e-14)
    two = unit_set([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
    assert sphere_stats.energy(two) == pytest.approx(1.0, abs=1e-15)
    square = lattice.project_to_sphere(enum(1, 2))
    assert sphere_stats.energy(square) == pytest.approx(4.0 * math.sqrt(2) + 2.0, rel=1e-14)


def test_energy_deviation_definition():
    assert sphere_stats.energy_deviation(OCTAHEDRON) == pytest.approx(
        12.0 * math.sqrt(2) + 3.0 - 30.0, rel=1e-12
    )


def test_energy_integer_identity_route(enum):
    # sum over t of A(n, t) / sqrt(2(n - t)/n) must match the float route
    n = 347
    sols = enum(n, 3)
    table = lattice.pair_correlation(sols)
    exact = sum(
        c * math.sqrt(n / (2.0 * (n - t)))
        for t, c in table.as_dict().items()
        if t != n
    )
    pts = lattice.project_to_sphere(sols)
    assert sphere_stats.energy(pts) == pytest.approx(exact, rel=1e-12)


def test_energy_coincident_points():
    dup = unit_set([[0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
    with pytest.raises(CoincidentPointsError):
        sphere_stats.energy(dup)


# covering radius


def test_covering_radius_octahedron():
    truth = math.sqrt(2.0 - 2.0 / math.sqrt(3))
    est, mesh = sphere_stats.covering_radius(OCTAHEDRON, mesh=0.01)
    assert mesh == 0.01
    assert est <= truth <= est + mesh


def test_covering_radius_single_point():
    one = unit_set([[0.0, 0.0, 1.0]])
    est, mesh = sphere_stats.covering_radius(one, mesh=0.01)
    assert est <= 2.0 <= est + mesh


def test_covering_radius_s3_cross_polytope(enum):
    pts = lattice.project_to_sphere(enum(1, 4))
    est, mesh = sphere_stats.covering_radius(pts, mesh=0.05)
    # farthest point (1,1,1,1)/2 sits at distance exactly 1
    assert est <= 1.0 <= est + mesh


def test_covering_radius_budget_and_mesh_validation():
    with pytest.raises(BudgetError):
        sphere_stats.covering_radius(OCTAHEDRON, mesh=0.001, probe_budget=10)
    with pytest.raises(ValueError):
        sphere_stats.covering_radius(OCTAHEDRON, mesh=0.0)


@pytest.mark.parametrize("k,mesh", [(2, 0.05), (3, 0.25)])
def test_probe_grid_certifies_mesh(k, mesh):
    from scipy.spatial import cKDTree

    blocks = list(sphere_stats._iter_probes(k, mesh))
    probes = np.concatenate(blocks)
    assert len(probes) == sphere_stats.probe_count(k, mesh)
    norms = np.einsum("ij,ij->i", probes, probes)
    assert np.max(np.abs(norms - 1.0)) < 1e-9
    sample = baselines.sample_uniform_sphere(40000, k, seed=13)
    d, _ = cKDTree(probes).query(sample.points, k=1, workers=-1)
    assert float(np.max(d)) <= mesh


def test_pole_annulus_gap_cross_polytope(enum):
    pts = lattice.project_to_sphere(enum(1, 4))
    assert sphere_stats.pole_annulus_gap(pts) == pytest.approx(math.sqrt(2) / 2.0, abs=1e-15)


def test_pole_annulus_gap_is_a_lower_bound(enum):
    for n in (11, 19, 51):
        pts = lattice.project_to_sphere(enum(n, 4))
        gap = sphere_stats.pole_annulus_gap(pts)
        est, mesh = sphere_stats.covering_radius(pts, mesh=0.1)
        assert gap <= est + mesh


def test_pole_annulus_gap_requires_arithmetic_s3():
    with pytest.raises(ValueError):
        sphere_stats.pole_annulus_gap(OCTAHEDRON)
    with pytest.raises(ValueError):
        sphere_stats.pole_annulus_gap(baselines.sample_uniform_sphere(100, 3, seed=0))


# cap discrepancy


def test_cap_discrepancy_uniform_sample_is_small():
    pts = baselines.sample_uniform_sphere(20000, 2, seed=1)
    assert sphere_stats.cap_discrepancy(pts, num_caps=500) < 0.05


def test_cap_discrepancy_single_point_is_large():
    one = unit_set([[0.0, 0.0, 1.0]])
    d = sphere_stats.cap_discrepancy(one, num_caps=2000)
    assert d > 0.9


def test_cap_discrepancy_deterministic_and_seeded():
    pts = baselines.sample_uniform_sphere(500, 3, seed=2)
    a = sphere_stats.cap_discrepancy(pts, num_caps=200, seed=0)
    b = sphere_stats.cap_discrepancy(pts, num_caps=200, seed=0)
    c = sphere_stats.cap_discrepancy(pts, num_caps=200, seed=1)
    assert a == b
    assert a != c


def test_cap_discrepancy_rejects_circle():
    circle = unit_set([[1.0, 0.0], [-1.0, 0.0]])
    with pytest.raises(ValueError):
        sphere_stats.cap_discrepancy(circle)


# reports and serialization


def test_report_json_is_valid_and_deterministic(enum):
    pts = lattice.project_to_sphere(enum(90, 3))
    report = sphere_stats.StatsReport(
        kind="arithmetic",
        k=2,
        N=pts.N,
        n=90,
        energy=sphere_stats.energy(pts),
        ripley=sphere_stats.ripley(pts, [0.5, 1.0]),
        spacing=sphere_stats.spacing_measure(pts),
        min_spacing=sphere_stats.min_spacing(pts),
    )
    text = report.to_json()
    parsed = json.loads(text)
    assert parsed["N"] == pts.N
    assert parsed["ripley"]["counts"] == list(report.ripley.counts)
    assert parsed["spacing"]["N"] == pts.N
    assert parsed["seed"] is None
    assert report.to_json() == text


def test_emit_json_rejects_non_finite():
    with pytest.raises(ValueError):
        sphere_stats.emit_json({"x": float("nan")})
    with pytest.raises(ValueError):
        sphere_stats.emit_json([float("inf")])


def test_fmt_float_round_trips():
    for x in (0.1, 1.0 / 3.0, 2.0 ** -52, 12345.6789):
        assert float(sphere_stats._fmt_float(x)) == x


def test_spacing_csv_golden(tmp_path):
    sm = sphere_stats.SpacingMeasure(
        N=4,
        raw=np.array([0.5, 1.5, 1.5, 9.0]),
        bin_edges=np.array([0.0, 1.0, 2.0]),
        masses=np.array([0.25, 0.5, 0.25]),
    )
    path = tmp_path / "spacing.csv"
    sphere_stats.write_spacing_csv(path, sm)
    assert path.read_text() == (
        "bin_left,bin_right,mass\n0,1,0.25\n1,2,0.5\n2,inf,0.25\n"
    )


def test_ripley_csv_golden(tmp_path, enum):
    prof = sphere_stats.ripley(lattice.project_to_sphere(enum(1, 3)), [1.5])
    path = tmp_path / "ripley.csv"
    sphere_stats.write_ripley_csv(path, prof)
    text = path.read_text()
    lines = text.strip().split("\n")
    assert lines[0] == "r,count,normalized"
    r, count, norm = lines[1].split(",")
    assert float(r) == 1.5
    assert count == "24"
    assert float(norm) == pytest.approx(24.0 / (36 * 1.5**2 / 4.0))
