import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spherepts import lattice
from spherepts.errors import BudgetError, EmptySetError


# brute-force oracles, deliberately naive


def brute(n: int, dim: int) -> list[tuple[int, ...]]:
    r = math.isqrt(n)
    pts = [
        x
        for x in itertools.product(range(-r, r + 1), repeat=dim)
        if sum(v * v for v in x) == n
    ]
    return sorted(pts)


def test_known_counts_dim3(enum):
    expected = {1: 6, 2: 12, 3: 8, 4: 6, 5: 24, 6: 24, 7: 0, 8: 12, 9: 30}
    for n, count in expected.items():
        assert enum(n, 3).N == count
        assert lattice.count_solutions(n, 3) == count


def test_known_counts_other_dims(enum):
    assert enum(5, 2).N == 8
    assert enum(1, 4).N == 8
    assert enum(3, 4).N == 32
    assert enum(5, 4).N == 48


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_enumeration_matches_brute_force_small(dim):
    limit = {2: 400, 3: 120, 4: 60}[dim]
    for n in range(1, limit + 1):
        sols = lattice.enumerate_solutions(n, dim)
        assert sols.point_tuples() == brute(n, dim), (n, dim)


@given(st.integers(min_value=1, max_value=2000))
@settings(max_examples=40, deadline=None)
def test_enumeration_matches_brute_force_sampled_dim3(n):
    assert lattice.enumerate_solutions(n, 3).point_tuples() == brute(n, 3)


@given(st.integers(min_value=1, max_value=3000), st.sampled_from([2, 3, 4]))
@settings(max_examples=60, deadline=None)
def test_count_and_existence_agree_with_enumeration(n, dim):
    sols = lattice.enumerate_solutions(n, dim)
    assert lattice.count_solutions(n, dim) == sols.N
    assert lattice.has_solutions(n, dim) is (sols.N > 0)


@given(st.integers(min_value=1, max_value=1500))
@settings(max_examples=30, deadline=None)
def test_sign_and_permutation_closure(n):
    sols = lattice.enumerate_solutions(n, 3)
    pts = set(sols.point_tuples())
    flipped = {(-x, y, z) for x, y, z in pts}
    swapped = {(y, x, z) for x, y, z in pts}
    cycled = {(z, x, y) for x, y, z in pts}
    assert flipped == pts
    assert swapped == pts
    assert cycled == pts


def test_solution_set_validates_rows():
    with pytest.raises(ValueError):
        lattice.SolutionSet(n=2, dim=3, points=np.array([[1, 1, 1]]))
    with pytest.raises(ValueError):  # canonical order required
        lattice.SolutionSet(n=1, dim=3, points=np.array([[1, 0, 0], [-1, 0, 0]]))
    with pytest.raises(ValueError):  # duplicates
        lattice.SolutionSet(n=1, dim=3, points=np.array([[0, 0, 1], [0, 0, 1]]))


def test_empty_solution_set_is_fine():
    s = lattice.SolutionSet(n=7, dim=3, points=np.zeros((0, 3), dtype=np.int64))
    assert s.N == 0


def test_budget_refusal():
    with pytest.raises(BudgetError):
        lattice.enumerate_solutions(10**7, 4)
    with pytest.raises(BudgetError):
        lattice.enumerate_solutions(100, 3, budget=99)
    with pytest.raises(BudgetError):
        lattice.count_solutions(100, 3, budget=99)
    with pytest.raises(BudgetError):
        lattice.has_solutions(100, 3, budget=99)


def test_argument_validation():
    with pytest.raises(ValueError):
        lattice.enumerate_solutions(10, 5)
    with pytest.raises(ValueError):
        lattice.enumerate_solutions(0, 3)


# pair correlation


def brute_pair_table(pts: list[tuple[int, ...]]) -> dict[int, int]:
    out: dict[int, int] = {}
    for a in pts:
        for b in pts:
            t = sum(u * v for u, v in zip(a, b))
            out[t] = out.get(t, 0) + 1
    return out


@pytest.mark.parametrize("n", [1, 2, 3, 5, 11, 38])
def test_pair_correlation_matches_double_loop(enum, n):
    sols = enum(n, 3)
    table = lattice.pair_correlation(sols)
    assert table.as_dict() == brute_pair_table(sols.point_tuples())


def test_pair_correlation_basic_identities(enum):
    sols = enum(1, 3)
    table = lattice.pair_correlation(sols)
    assert table.count_at(1) == 6  # diagonal
    assert table.count_at(-1) == 6  # antipodes
    assert table.count_at(0) == 24
    assert table.total() == 36
    # inner products come in +-t pairs because the set is antipodally closed
    big = lattice.pair_correlation(enum(101, 3))
    for t, c in big.as_dict().items():
        assert big.count_at(-t) == c


def test_pair_correlation_diagonal_and_total(enum):
    for n in (5, 90, 101):
        sols = enum(n, 3)
        table = lattice.pair_correlation(sols)
        assert table.count_at(n) == sols.N
        assert table.count_at(-n) == sols.N
        assert table.total() == sols.N**2


def test_tail_count_matches_dict(enum):
    table = lattice.pair_correlation(enum(101, 3))
    d = table.as_dict()
    t_min = 40
    assert table.tail_count(t_min, 100) == sum(c for t, c in d.items() if t_min <= t <= 100)


def test_pair_budget_refusal(enum):
    with pytest.raises(BudgetError):
        lattice.pair_correlation(enum(101, 3), budget=10)


# shifted counts


def brute_shifted(pts: list[tuple[int, ...]], h: tuple[int, ...]) -> int:
    s = set(pts)
    return sum(1 for x in s if tuple(a + b for a, b in zip(x, h)) in s)


@pytest.mark.parametrize("n", [1, 2, 5, 25, 90])
@pytest.mark.parametrize("h", [(2, 0, 0), (1, 1, 0), (-1, 2, 1), (6, 0, 0)])
def test_shifted_count_matches_brute(enum, n, h):
    sols = enum(n, 3)
    assert lattice.shifted_count(sols, h) == brute_shifted(sols.point_tuples(), h)


def test_shifted_count_rejects_bad_shift(enum):
    with pytest.raises(ValueError):
        lattice.shifted_count(enum(5, 3), (0, 0, 0))
    with pytest.raises(ValueError):
        lattice.shifted_count(enum(5, 3), (1, 0))


def test_shifted_count_large_coordinate_fallback():
    # base large enough that packed keys would overflow int64 in dim 4
    sols = lattice.enumerate_solutions(80_000, 4)
    h = (2, 0, 0, 0)
    got = lattice.shifted_count(sols, h)
    assert got == brute_shifted(sols.point_tuples(), h)


def brute_quadruples(pts, h, k):
    s = set(pts)
    count = 0
    for x in s:
        for y in s:
            if tuple(a - b for a, b in zip(x, y)) != h:
                continue
            for z in s:
                for w in s:
                    if tuple(a - b for a, b in zip(z, w)) == k:
                        count += 1
    return count


@pytest.mark.parametrize("h,k", [((2, 0, 0), (0, 2, 0)), ((1, 1, 0), (1, 1, 0))])
def test_double_shifted_count_factorizes(enum, h, k):
    sols = enum(2, 3)
    got = lattice.double_shifted_count(sols, h, k)
    # shifted pairs x - y = h match x -> x + h membership up to sign of h
    assert got == lattice.shifted_count(sols, h) * lattice.shifted_count(sols, k)
    assert got == brute_quadruples(sols.point_tuples(), h, k)


# primitive filter and projection


@given(st.integers(min_value=1, max_value=1000))
@settings(max_examples=30, deadline=None)
def test_filter_primitive_matches_gcd(n):
    sols = lattice.enumerate_solutions(n, 3)
    kept = lattice.filter_primitive(sols)
    expected = sorted(
        p for p in sols.point_tuples() if math.gcd(math.gcd(abs(p[0]), abs(p[1])), abs(p[2])) == 1
    )
    assert kept.point_tuples() == expected


def test_filter_primitive_can_empty(enum):
    assert lattice.filter_primitive(enum(4, 3)).N == 0


def test_projection_unit_norms(enum):
    pts = lattice.project_to_sphere(enum(90, 3))
    norms = np.einsum("ij,ij->i", pts.points, pts.points)
    assert np.max(np.abs(norms - 1.0)) < 1e-12
    assert pts.N == enum(90, 3).N
    assert pts.source is enum(90, 3)
    assert pts.provenance.kind == "arithmetic"


def test_projection_of_empty_set_raises(enum):
    with pytest.raises(EmptySetError):
        lattice.project_to_sphere(enum(7, 3))


# close pairs in dimension 4


def test_close_pair_examples():
    for n in range(3, 2001, 2):
        p, q, dist = lattice.close_pair_dim4(n)
        a = p[0]
        assert a in (1, 2)
        assert sum(v * v for v in p) == n
        assert sum(v * v for v in q) == n
        assert q == (-a,) + p[1:]
        assert math.isclose(dist, 2 * a / math.sqrt(n))
        assert dist * math.sqrt(n) <= 4.0


def test_close_pair_rejects_even_and_tiny():
    with pytest.raises(ValueError):
        lattice.close_pair_dim4(10)
    with pytest.raises(ValueError):
        lattice.close_pair_dim4(1)


# files


def test_point_set_roundtrip(tmp_path, enum):
    for n in (5, 7, 90):
        path = tmp_path / f"pts{n}.csv"
        lattice.write_point_set(path, enum(n, 3))
        back = lattice.read_point_set(path)
        assert back.n == n
        assert back.point_tuples() == enum(n, 3).point_tuples()


def test_read_point_set_rejects_bad_header(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("x,y,z\n1,0,0\n")
    with pytest.raises(ValueError):
        lattice.read_point_set(p)


def test_pair_correlation_csv(tmp_path, enum):
    table = lattice.pair_correlation(enum(1, 3))
    path = tmp_path / "pc.csv"
    lattice.write_pair_correlation(path, table)
    assert path.read_text() == "t,count\n-1,6\n0,24\n1,6\n"


# vectorized integer square root used by the scanners


@given(st.lists(st.integers(min_value=0, max_value=2**52 - 1), min_size=1, max_size=50))
@settings(max_examples=200)
def test_isqrt_array_matches_math_isqrt(values):
    arr = np.array(values, dtype=np.int64)
    got = lattice._isqrt_array(arr)
    assert got.tolist() == [math.isqrt(v) for v in values]
