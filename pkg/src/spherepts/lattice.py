"""Integer points on spheres x_1^2 + ... + x_t^2 = n and their projections.

Enumeration scans x_1 (and x_2 in dimension 4) over the nonnegative half-space
and tests the remainder for being a perfect square; the scan is vectorized in
blocks and the x_1 < 0 half is emitted by mirroring, which is sound because
the residual equation is identical for +-x_1.  Point sets are kept as
lexicographically sorted read-only int64 arrays.

File formats
------------
Point-set CSV: line 1 is the literal header ``dim,n``, line 2 the two values,
then one row of integer coordinates per point (no further header).
Pair-correlation CSV: header ``t,count`` then one row per realized dot value,
ascending in t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import config
from .errors import BudgetError, EmptySetError
from .numtheory import isqrt, three_squares_representable

# Largest flattened scan block; bounds peak memory at ~10 int64 arrays of this size.
_BLOCK_ELEMS = 20_000_000


@lru_cache(maxsize=1)
def _default_budgets() -> dict[int, int]:
    cfg = config.load_defaults()
    return {2: cfg["enum_budget_dim2"], 3: cfg["enum_budget_dim3"], 4: cfg["enum_budget_dim4"]}


def _isqrt_array(v: np.ndarray) -> np.ndarray:
    """Exact elementwise floor(sqrt(v)) for int64 v >= 0 below 2^52."""
    r = np.sqrt(v.astype(np.float64)).astype(np.int64)
    # float sqrt is within 1 ulp, so one correction each way suffices
    r -= r * r > v
    r += (r + 1) * (r + 1) <= v
    return r


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class Provenance:
    """Where a unit point set came from: arithmetic(n), random(seed), rigid(params)."""

    kind: str
    n: int | None = None
    seed: int | None = None
    params: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("arithmetic", "random", "rigid"):
            raise ValueError(f"unknown provenance kind {self.kind!r}")


@dataclass(frozen=True)
class SolutionSet:
    """All integer solutions of |x|^2 = n in the given dimension.

    points is an (N, dim) int64 array in lexicographic row order, closed under
    coordinate sign changes and permutations, immutable.
    """

    n: int
    dim: int
    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.int64)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise ValueError("points must be an (N, dim) array")
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        # norms are exact in int64: coords <= isqrt(2e8) < 2^15, sums < 2^35
        if pts.shape[0]:
            norms = np.einsum("ij,ij->i", pts, pts)
            if not np.all(norms == self.n):
                raise ValueError(f"row with |x|^2 != {self.n}")
            order = np.lexsort(pts.T[::-1])
            if not np.array_equal(order, np.arange(pts.shape[0])):
                raise ValueError("points must be lexicographically sorted")
            if np.any(np.all(np.diff(pts, axis=0) == 0, axis=1)):
                raise ValueError("duplicate points")

    @property
    def N(self) -> int:
        return self.points.shape[0]

    def point_tuples(self) -> list[tuple[int, ...]]:
        return [tuple(row) for row in self.points.tolist()]


@dataclass(frozen=True)
class PairCorrelationTable:
    """Counts A(n, t) of ordered pairs (x, y), x and y both in the set, with
    <x, y> = t.  Diagonal pairs are included, so A(n, n) = N and the counts
    total N^2."""

    n: int
    N: int
    t_values: np.ndarray = field(repr=False)  # ascending int64
    counts: np.ndarray = field(repr=False)  # aligned with t_values

    def __post_init__(self):
        t = np.asarray(self.t_values, dtype=np.int64).copy()
        c = np.asarray(self.counts, dtype=np.int64).copy()
        t.flags.writeable = False
        c.flags.writeable = False
        object.__setattr__(self, "t_values", t)
        object.__setattr__(self, "counts", c)

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.t_values.tolist(), self.counts.tolist()))

    def count_at(self, t: int) -> int:
        i = np.searchsorted(self.t_values, t)
        if i < len(self.t_values) and self.t_values[i] == t:
            return int(self.counts[i])
        return 0

    def total(self) -> int:
        return int(self.counts.sum())

    def tail_count(self, t_min: int, t_max: int) -> int:
        """Sum of counts over t in [t_min, t_max]."""
        lo = np.searchsorted(self.t_values, t_min, side="left")
        hi = np.searchsorted(self.t_values, t_max, side="right")
        return int(self.counts[lo:hi].sum())


@dataclass(frozen=True)
class UnitPointSet:
    """Finite subset of the unit sphere S^k in R^(k+1), float64 rows.

    Arithmetic sets keep a reference to their integer source so statistics can
    use exact integer identities.
    """

    k: int
    points: np.ndarray = field(repr=False)
    provenance: Provenance = Provenance("random")
    source: SolutionSet | None = field(default=None, repr=False)

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != self.k + 1:
            raise ValueError("points must be an (N, k+1) array")
        if pts.shape[0] == 0:
            raise EmptySetError("unit point set must be nonempty")
        norms = np.einsum("ij,ij->i", pts, pts)
        if np.max(np.abs(norms - 1.0)) > 1e-12:
            raise ValueError("points must lie on the unit sphere within 1e-12")
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        if self.provenance.kind == "arithmetic" and self.source is not None:
            if self.source.N != pts.shape[0]:
                raise ValueError("arithmetic point count must match the solution set")

    @property
    def N(self) -> int:
        return self.points.shape[0]


# ---------------------------------------------------------------------------
# enumeration


def _check_enum_args(n: int, dim: int, budget: int | None) -> int:
    if dim not in (2, 3, 4):
        raise ValueError("dim must be 2, 3 or 4")
    if n < 1:
        raise ValueError("n must be >= 1")
    ceiling = budget if budget is not None else _default_budgets()[dim]
    if n > ceiling:
        raise BudgetError(f"n = {n} exceeds the dim-{dim} enumeration ceiling {ceiling}")
    return ceiling


def _flatten_centered(widths_half: np.ndarray):
    """Flatten ranges [-w_i, w_i]: returns (block index, offset value) arrays."""
    w = 2 * widths_half + 1
    total = int(w.sum())
    bid = np.repeat(np.arange(widths_half.size, dtype=np.int64), w)
    starts = np.zeros(widths_half.size, dtype=np.int64)
    np.cumsum(w[:-1], out=starts[1:])
    offs = np.arange(total, dtype=np.int64) - starts[bid]
    return bid, offs - widths_half[bid]


def _scan_tail2(n_like: np.ndarray, x_tail: np.ndarray | None = None):
    """Solve x^2 + y^2 = m for each m in n_like over a full centered x range.

    Returns (row index into n_like, x, y>=0, y>0 flag) for every solution with
    y >= 0; callers expand the y sign.
    """
    s = _isqrt_array(n_like)
    bid, x = _flatten_centered(s)
    rem = n_like[bid] - x * x
    y = _isqrt_array(rem)
    hit = y * y == rem
    return bid[hit], x[hit], y[hit]


def _iter_x1_blocks(n: int, want_all: bool):
    """Yield blocks of x1 >= 0 values sized so the inner scan fits in memory.

    With want_all False the first block is tiny: most representable n show a
    solution there, letting emptiness checks exit early.
    """
    s1 = isqrt(n)
    width = 2 * isqrt(n) + 1  # upper bound on inner row length
    per_block = max(1, _BLOCK_ELEMS // width)
    lo = 0
    if not want_all:
        first = min(8, s1 + 1)
        yield np.arange(0, first, dtype=np.int64)
        lo = first
    while lo <= s1:
        hi = min(lo + per_block, s1 + 1)
        yield np.arange(lo, hi, dtype=np.int64)
        lo = hi


def _expand_signs_dim3(x1, x2, y):
    """Rows for (x1, x2, +-y) plus the x1 < 0 mirrors; x1 >= 0 on input."""
    pos = y > 0
    base = np.stack([x1, x2, y], axis=1)
    neg = np.stack([x1[pos], x2[pos], -y[pos]], axis=1)
    both = np.concatenate([base, neg], axis=0)
    mirror = both[both[:, 0] > 0] * np.array([-1, 1, 1], dtype=np.int64)
    return np.concatenate([both, mirror], axis=0)


def _canonical(rows: np.ndarray, n: int, dim: int) -> SolutionSet:
    if rows.size:
        rows = rows[np.lexsort(rows.T[::-1])]
    else:
        rows = rows.reshape(0, dim)
    return SolutionSet(n=n, dim=dim, points=rows)


def enumerate_solutions(n: int, dim: int = 3, budget: int | None = None) -> SolutionSet:
    """All x in Z^dim with |x|^2 = n, lexicographically sorted.

    Raises BudgetError when n exceeds the configured ceiling for the
    dimension (the scan is Theta(n) in dimension 3 and Theta(n^(3/2)) in
    dimension 4).
    """
    _check_enum_args(n, dim, budget)
    if dim == 2:
        bid, x, y = _scan_tail2(np.array([n], dtype=np.int64))
        pos = y > 0
        rows = np.concatenate(
            [np.stack([x, y], axis=1), np.stack([x[pos], -y[pos]], axis=1)], axis=0
        )
        return _canonical(rows, n, dim)
    if dim == 3:
        parts = []
        for x1vals in _iter_x1_blocks(n, want_all=True):
            rem1 = n - x1vals * x1vals
            bid, x2, y = _scan_tail2(rem1)
            parts.append(_expand_signs_dim3(x1vals[bid], x2, y))
        return _canonical(np.concatenate(parts, axis=0), n, dim)
    # dim 4: flatten (x1 >= 0, x2) pairs, then scan (x3, x4) like dim 3
    parts = [np.zeros((0, 4), dtype=np.int64)]
    for p_x1, p_x2, p_rem in _iter_pairs4(n):
        bid, x3, y = _scan_tail2(p_rem)
        parts.append(_expand_dim4(p_x1[bid], p_x2[bid], x3, y))
    return _canonical(np.concatenate(parts, axis=0), n, dim)


def _expand_dim4(x1, x2, x3, y):
    pos = y > 0
    base = np.stack([x1, x2, x3, y], axis=1)
    neg = np.stack([x1[pos], x2[pos], x3[pos], -y[pos]], axis=1)
    both = np.concatenate([base, neg], axis=0)
    mirror = both[both[:, 0] > 0] * np.array([-1, 1, 1, 1], dtype=np.int64)
    return np.concatenate([both, mirror], axis=0)


def _iter_pairs4(n: int):
    """Blocks of (x1 >= 0, x2, n - x1^2 - x2^2) with x1^2 + x2^2 <= n."""
    s1 = isqrt(n)
    x1vals = np.arange(0, s1 + 1, dtype=np.int64)
    rem1 = n - x1vals * x1vals
    s2 = _isqrt_array(rem1)
    bid, x2 = _flatten_centered(s2)
    x1 = x1vals[bid]
    rem2 = rem1[bid] - x2 * x2
    # chunk pairs so the level-2 flatten stays below the block budget
    cum = np.cumsum(2 * _isqrt_array(rem2) + 1)
    cuts = np.searchsorted(cum, np.arange(_BLOCK_ELEMS, int(cum[-1]), _BLOCK_ELEMS)) + 1
    lo = 0
    for hi in [int(c) for c in cuts] + [len(cum)]:
        if hi > lo:
            yield x1[lo:hi], x2[lo:hi], rem2[lo:hi]
            lo = hi


def count_solutions(n: int, dim: int = 3, budget: int | None = None) -> int:
    """len(enumerate_solutions(n, dim)) without materializing the points."""
    _check_enum_args(n, dim, budget)
    if dim == 2:
        bid, x, y = _scan_tail2(np.array([n], dtype=np.int64))
        return int((1 + (y > 0)).sum())
    total = 0
    if dim == 3:
        for x1vals in _iter_x1_blocks(n, want_all=True):
            rem1 = n - x1vals * x1vals
            bid, x2, y = _scan_tail2(rem1)
            x1 = x1vals[bid]
            total += int(((1 + (y > 0)) * (1 + (x1 > 0))).sum())
        return total
    for p_x1, p_x2, p_rem in _iter_pairs4(n):
        bid, x3, y = _scan_tail2(p_rem)
        x1 = p_x1[bid]
        total += int(((1 + (y > 0)) * (1 + (x1 > 0))).sum())
    return total


def has_solutions(n: int, dim: int = 3, budget: int | None = None) -> bool:
    """enumerate_solutions(n, dim) nonempty, decided by the same scan with an
    early exit on the first block containing a solution."""
    _check_enum_args(n, dim, budget)
    if dim == 2:
        bid, x, y = _scan_tail2(np.array([n], dtype=np.int64))
        return bool(len(x))
    if dim == 3:
        for x1vals in _iter_x1_blocks(n, want_all=False):
            rem1 = n - x1vals * x1vals
            s2 = _isqrt_array(rem1)
            bid, x2 = _flatten_centered(s2)
            rem2 = rem1[bid] - x2 * x2
            y = _isqrt_array(rem2)
            if np.any(y * y == rem2):
                return True
        return False
    for p_x1, p_x2, p_rem in _iter_pairs4(n):
        bid, x3, y = _scan_tail2(p_rem)
        if len(x3):
            return True
    return False


def filter_primitive(s: SolutionSet) -> SolutionSet:
    """The subset of solutions with gcd of coordinates equal to 1."""
    if s.N == 0:
        return s
    g = np.gcd.reduce(np.abs(s.points), axis=1)
    return SolutionSet(n=s.n, dim=s.dim, points=s.points[g == 1])


def project_to_sphere(s: SolutionSet) -> UnitPointSet:
    """The set scaled by 1/sqrt(n) onto the unit sphere S^(dim-1)."""
    if s.N == 0:
        raise EmptySetError(f"no lattice points on the sphere of radius^2 = {s.n}")
    pts = s.points.astype(np.float64) / math.sqrt(s.n)
    return UnitPointSet(
        k=s.dim - 1, points=pts, provenance=Provenance("arithmetic", n=s.n), source=s
    )


# ---------------------------------------------------------------------------
# pair statistics (exact integer dot products)


def _gram_int(points: np.ndarray, other: np.ndarray | None = None) -> np.ndarray:
    """Exact integer Gram matrix via float64 BLAS.

    Coordinates are bounded by isqrt(2e8) < 2^15, so every product and every
    dot sum is an integer far below 2^53 and the float path is exact.
    """
    a = points.astype(np.float64)
    b = a if other is None else other.astype(np.float64)
    return np.rint(a @ b.T).astype(np.int64)


def pair_correlation(s: SolutionSet, budget: int | None = None) -> PairCorrelationTable:
    """A(n, t) for all realized t, including the diagonal t = n."""
    if s.N == 0:
        raise EmptySetError("pair correlation of an empty set")
    limit = budget if budget is not None else config.load_defaults()["pair_budget"]
    if s.N * s.N > limit:
        raise BudgetError(f"N^2 = {s.N**2} ordered pairs exceeds the pair budget {limit}")
    n = s.n
    hist = np.zeros(2 * n + 2, dtype=np.int64)
    chunk = max(1, _BLOCK_ELEMS // (8 * max(1, s.N)))
    a = s.points.astype(np.float64)
    for lo in range(0, s.N, chunk):
        g = np.rint(a[lo : lo + chunk] @ a.T).astype(np.int64)
        hist += np.bincount((g + n).ravel(), minlength=2 * n + 2)
    t = np.flatnonzero(hist)
    return PairCorrelationTable(n=n, N=s.N, t_values=t - n, counts=hist[t])


def _encode_rows(points: np.ndarray, base: int, span: int) -> np.ndarray:
    key = points[:, 0].astype(np.int64) + base
    for i in range(1, points.shape[1]):
        key = key * span + (points[:, i] + base)
    return key


def shifted_count(s: SolutionSet, h: tuple[int, ...]) -> int:
    """K_h: ordered pairs (x, y) in the set with x - y = h.  h must be nonzero."""
    if len(h) != s.dim:
        raise ValueError("shift length must match the dimension")
    if all(c == 0 for c in h):
        raise ValueError("shift must be nonzero")
    if s.N == 0:
        return 0
    bound = isqrt(s.n) + max(abs(c) for c in h)
    span = 2 * bound + 1
    if span**s.dim >= 2**63:  # packed keys would overflow; fall back to hashing
        pts = set(s.point_tuples())
        return sum(1 for y in pts if tuple(c + d for c, d in zip(y, h)) in pts)
    keys = np.sort(_encode_rows(s.points, bound, span))
    targets = _encode_rows(s.points + np.asarray(h, dtype=np.int64), bound, span)
    idx = np.searchsorted(keys, targets)
    idx[idx == len(keys)] = 0
    return int((keys[idx] == targets).sum())


def double_shifted_count(s: SolutionSet, h: tuple[int, ...], k: tuple[int, ...]) -> int:
    """K_{h,k}: quadruples (x, y, z, w) with x - y = h and z - w = k.

    The quadruple sum factorizes as K_h * K_k; for small sets (N <= 200) the
    factors are re-derived by a direct O(N^2) difference scan as a cross-check.
    """
    kh = shifted_count(s, h)
    kk = shifted_count(s, k)
    if 0 < s.N <= 200:
        for shift, expect in ((h, kh), (k, kk)):
            diffs = s.points[:, None, :] - s.points[None, :, :]
            direct = int(np.all(diffs == np.asarray(shift), axis=2).sum())
            if direct != expect:
                raise AssertionError(f"shifted count mismatch for {shift}")
    return kh * kk


# ---------------------------------------------------------------------------
# dimension-4 close pairs


def _find_three_square_rep(m: int) -> tuple[int, int, int]:
    """One solution of x^2 + y^2 + z^2 = m, m representable; deterministic."""
    if m == 0:
        return (0, 0, 0)
    for x1 in range(isqrt(m), -1, -1):
        rem = m - x1 * x1
        x2 = np.arange(isqrt(rem), -1, -1, dtype=np.int64)
        rem2 = rem - x2 * x2
        y = _isqrt_array(rem2)
        hit = np.flatnonzero(y * y == rem2)
        if len(hit):
            i = hit[0]
            return (x1, int(x2[i]), int(y[i]))
    raise ValueError(f"{m} is not a sum of three squares")


def close_pair_dim4(n: int) -> tuple[tuple[int, ...], tuple[int, ...], float]:
    """Two points of the dim-4 set at distance 2a/sqrt(n), a in {1, 2}.

    For odd n, n - 1 or n - 4 is a sum of three squares (n - 1 is 2 mod 4
    when n is 3 mod 4; n - 4 avoids 7 mod 8 when n is 1 mod 4), so the pair
    (a, x), (-a, x) always exists.  Certifies m * sqrt(n) <= 4.
    """
    if n < 3 or n % 2 == 0:
        raise ValueError("close_pair_dim4 needs odd n >= 3")
    for a in (1, 2):
        m = n - a * a
        if three_squares_representable(m):
            x = _find_three_square_rep(m)
            p = (a,) + x
            q = (-a,) + x
            return p, q, 2 * a / math.sqrt(n)
    raise ArithmeticError(f"no close pair for n = {n}")  # unreachable for odd n


# ---------------------------------------------------------------------------
# files


def write_point_set(path: str | Path, s: SolutionSet) -> None:
    lines = ["dim,n", f"{s.dim},{s.n}"]
    lines += [",".join(map(str, row)) for row in s.points.tolist()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_point_set(path: str | Path) -> SolutionSet:
    lines = Path(path).read_text().splitlines()
    if len(lines) < 2 or lines[0].strip() != "dim,n":
        raise ValueError(f"{path}: expected 'dim,n' header")
    dim, n = (int(v) for v in lines[1].split(","))
    rows = [[int(v) for v in line.split(",")] for line in lines[2:] if line.strip()]
    pts = np.array(rows, dtype=np.int64).reshape(len(rows), dim)
    if len(rows):
        pts = pts[np.lexsort(pts.T[::-1])]
    return SolutionSet(n=n, dim=dim, points=pts)


def write_pair_correlation(path: str | Path, table: PairCorrelationTable) -> None:
    lines = ["t,count"]
    lines += [f"{t},{c}" for t, c in zip(table.t_values.tolist(), table.counts.tolist())]
    Path(path).write_text("\n".join(lines) + "\n")
