"""Integer utilities for classifying sphere radii n.

The representability tests are residue tests after stripping powers of four:
x^2 + y^2 + z^2 = n is solvable iff the 4-free part of n is not 7 mod 8, and a
primitive solution (gcd of coordinates 1) exists iff n mod 8 is not 0, 4 or 7.
Factorization is trial division over a cached prime table up to 10^6 with a
deterministic Brent-rho fallback; primality below 2^64 is certified by
Miller-Rabin with a fixed witness set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Deterministic Miller-Rabin witnesses: correct for every n < 2^64.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_TRIAL_LIMIT = 10**6
_small_primes: list[int] | None = None


@dataclass(frozen=True)
class FactoredInteger:
    """n together with its prime factorization, exponents sorted by prime."""

    n: int
    factors: tuple[tuple[int, int], ...]

    def value(self) -> int:
        v = 1
        for p, e in self.factors:
            v *= p**e
        return v


def isqrt(n: int) -> int:
    """Exact floor(sqrt(n)) for n >= 0."""
    return math.isqrt(n)


def is_perfect_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def _prime_table() -> list[int]:
    global _small_primes
    if _small_primes is None:
        limit = _TRIAL_LIMIT
        sieve = bytearray([1]) * (limit + 1)
        sieve[0] = sieve[1] = 0
        for p in range(2, math.isqrt(limit) + 1):
            if sieve[p]:
                sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
        _small_primes = [i for i, flag in enumerate(sieve) if flag]
    return _small_primes


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 2^64."""
    if n >= 1 << 64:
        raise ValueError("primality test is only certified below 2^64")
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent_rho(n: int) -> int:
    """A nontrivial factor of composite n with no factor <= 10^6.

    Brent's cycle variant of Pollard rho.  The polynomial offset c is swept
    deterministically 1, 2, 3, ... so the routine has no random state; for
    composite n some c always succeeds.
    """
    if n % 2 == 0:
        return 2
    for c in range(1, 1000):
        y, r, q = 2, 1, 1
        g, x, ys = 1, y, y
        m = 128
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"rho failed to split {n}")  # pragma: no cover


def factorize(n: int) -> FactoredInteger:
    """Prime factorization of n >= 1, exponents sorted by prime."""
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    if n >= 1 << 64:
        raise ValueError("factorize is certified below 2^64 only")
    m = n
    out: dict[int, int] = {}
    for p in _prime_table():
        if p * p > m:
            break
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
    # m is now 1, a prime, or a product of primes > 10^6
    stack = [m] if m > 1 else []
    while stack:
        v = stack.pop()
        if v == 1:
            continue
        if is_prime(v):
            out[v] = out.get(v, 0) + 1
            continue
        r = math.isqrt(v)
        if r * r == v:
            stack += [r, r]
            continue
        d = _brent_rho(v)
        stack += [d, v // d]
    return FactoredInteger(n, tuple(sorted(out.items())))


def is_squarefree(n: int) -> bool:
    if n < 1:
        raise ValueError("is_squarefree needs n >= 1")
    return all(e == 1 for _, e in factorize(n).factors)


def strip_four_powers(n: int) -> tuple[int, int]:
    """(a, m) with n = 4^a * m and m not divisible by 4."""
    if n < 1:
        raise ValueError("strip_four_powers needs n >= 1")
    a = 0
    while n % 4 == 0:
        n //= 4
        a += 1
    return a, n


def three_squares_representable(n: int) -> bool:
    """True iff x^2 + y^2 + z^2 = n has an integer solution (n >= 0)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return True
    _, m = strip_four_powers(n)
    return m % 8 != 7


def admits_primitive(n: int) -> bool:
    """True iff some solution of x^2+y^2+z^2 = n has gcd(x, y, z) = 1."""
    if n < 1:
        raise ValueError("n must be positive")
    return n % 8 not in (0, 4, 7)
