"""Hurwitz class numbers, stored exactly as integers in units of 1/12.

H(n) is the number of SL_2(Z)-classes of positive definite binary quadratic
forms (primitive or not) of discriminant -n, the classes of a(x^2 + y^2)
and a(x^2 + xy + y^2) counted with weights 1/2 and 1/3.  H(0) = -1/12.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Dict

import numpy as np


def _twelve_hurwitz_table(bound: int) -> np.ndarray:
    """12 H(n) for 0 <= n <= bound by sweeping reduced forms (a, b, c).

    Reduced means |b| <= a <= c with b >= 0 whenever |b| = a or a = c.  For
    fixed (a, b) the discriminants 4ac - b^2 form an arithmetic progression
    in c, so each pair is one strided slice update.
    """
    counts = np.zeros(bound + 1, dtype=np.int64)
    a = 1
    while 3 * a * a <= bound:
        step = 4 * a
        for b in range(-a + 1, a + 1):
            c_min = a if b >= 0 else a + 1
            start = step * c_min - b * b
            if start <= bound:
                counts[start::step] += 12
        if 4 * a * a <= bound:
            counts[4 * a * a] -= 6
        counts[3 * a * a] -= 8
        a += 1
    counts[0] = -1
    return counts


def _smallest_prime_factor(bound: int) -> np.ndarray:
    spf = np.zeros(bound + 1, dtype=np.int64)
    for i in range(2, isqrt(bound) + 1):
        if spf[i] == 0:
            block = spf[i * i :: i]
            block[block == 0] = i
    rest = spf == 0
    spf[rest] = np.arange(bound + 1)[rest]
    return spf


class HurwitzCache:
    """Table of 12 H(n) for 0 <= n <= bound.

    Immutable after construction.  ``twelve_h(n)`` returns the exact integer
    12 H(n); ``primitive_twelve_h(n)`` the weighted count of primitive
    classes of discriminant -n (12 h_w(-n)), obtained by Moebius inversion
    of H(n) = sum_{f} h_w(-n / f^2).
    """

    def __init__(self, bound: int):
        if bound < 0:
            raise ValueError("bound must be nonnegative")
        self.bound = bound
        self._table = _twelve_hurwitz_table(bound)
        self._table.setflags(write=False)
        self._spf = _smallest_prime_factor(max(bound, 1))
        self._spf.setflags(write=False)

    def __contains__(self, n: int) -> bool:
        return 0 <= n <= self.bound

    def _check(self, n: int) -> None:
        if not 0 <= n <= self.bound:
            raise IndexError(f"n={n} outside Hurwitz cache [0, {self.bound}]")

    def twelve_h(self, n: int) -> int:
        self._check(n)
        return int(self._table[n])

    def hurwitz(self, n: int) -> Fraction:
        return Fraction(self.twelve_h(n), 12)

    @property
    def table(self) -> np.ndarray:
        return self._table

    def factor(self, n: int) -> Dict[int, int]:
        self._check(n)
        out: Dict[int, int] = {}
        while n > 1:
            p = int(self._spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
        return out

    def conductor_divisors(self, n: int):
        """All f >= 1 with f^2 | n and -n/f^2 a discriminant (0, 1 mod 4)."""
        if n <= 0 or n % 4 in (1, 2):
            return []
        fac = self.factor(n)
        divs = [1]
        for p, e in fac.items():
            divs = [d * p**j for d in divs for j in range(e // 2 + 1)]
        return sorted(f for f in divs if (n // (f * f)) % 4 in (0, 3))

    def primitive_twelve_h(self, n: int) -> int:
        """12 h_w(-n): primitive classes only, weights 1/2, 1/3 at n = 4, 3."""
        total = 0
        for f in self.conductor_divisors(n):
            mu = _mobius(f)
            if mu:
                total += mu * self.twelve_h(n // (f * f))
        return total


@lru_cache(maxsize=None)
def _mobius(n: int) -> int:
    result = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            result = -result
        d += 1
    if n > 1:
        result = -result
    return result


_shared: Dict[str, HurwitzCache] = {}


def hurwitz(n: int) -> Fraction:
    """Hurwitz class number H(n) as an exact fraction."""
    if n < 0:
        raise ValueError("H(n) is defined for n >= 0")
    cache = _shared.get("default")
    if cache is None or n > cache.bound:
        cache = HurwitzCache(max(2 * n, 1024))
        _shared["default"] = cache
    return cache.hurwitz(n)
