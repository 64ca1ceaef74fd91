"""Segmented sieve of Eratosthenes.

Memory stays O(sqrt(x) + segment) regardless of the bound. Tables up to
``MATERIALIZE_LIMIT`` keep their primes in an array; above that the primes
are streamed segment by segment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt
from typing import Iterator, Optional

import numpy as np

MATERIALIZE_LIMIT = 10**7
SEGMENT_SIZE = 1 << 18


def _small_primes(n: int) -> np.ndarray:
    """Plain sieve for the base primes up to ``n``."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for i in range(2, isqrt(n) + 1):
        if flags[i]:
            flags[i * i :: i] = False
    return np.flatnonzero(flags).astype(np.int64)


def prime_segments(
    x: int, lo: int = 2, segment_size: int = SEGMENT_SIZE
) -> Iterator[np.ndarray]:
    """Yield ascending arrays of the primes in ``[lo, x]``, one per segment."""
    lo = max(lo, 2)
    if x < lo:
        return
    base = _small_primes(isqrt(x))
    start = lo
    while start <= x:
        stop = min(start + segment_size, x + 1)
        flags = np.ones(stop - start, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= stop:
                break
            first = max(p * p, ((start + p - 1) // p) * p)
            flags[first - start :: p] = False
        yield np.flatnonzero(flags).astype(np.int64) + start
        start = stop


@dataclass(frozen=True)
class PrimeTable:
    """Primes up to ``bound``, with the divisors of ``level`` hidden on query.

    Attributes:
        bound: sieving limit x (inclusive).
        level: primes dividing it are omitted by ``count`` and iteration.
    """

    bound: int
    level: int = 1
    _primes: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def materialized(self) -> bool:
        return self._primes is not None

    @property
    def primes(self) -> np.ndarray:
        """All primes <= bound coprime to the level, as an int64 array."""
        if self._primes is None:
            raise MemoryError(
                f"table to {self.bound} is streamed; iterate over it instead"
            )
        if self.level == 1:
            return self._primes
        return self._primes[np.gcd(self._primes, self.level) == 1]

    def segments(self, x: Optional[int] = None) -> Iterator[np.ndarray]:
        x = self.bound if x is None else min(x, self.bound)
        if self._primes is not None:
            seg = self.primes
            yield seg[seg <= x]
            return
        for seg in prime_segments(x):
            if self.level != 1:
                seg = seg[np.gcd(seg, self.level) == 1]
            yield seg

    def __iter__(self) -> Iterator[int]:
        for seg in self.segments():
            yield from (int(p) for p in seg)

    def count(self, x: Optional[int] = None) -> int:
        """pi_N(x): number of primes <= x not dividing the level."""
        x = self.bound if x is None else x
        if x > self.bound:
            raise ValueError(f"x={x} exceeds sieve bound {self.bound}")
        if self._primes is not None:
            return int(np.searchsorted(self.primes, x, side="right"))
        return sum(len(seg) for seg in self.segments(x))

    def with_level(self, level: int) -> "PrimeTable":
        return PrimeTable(self.bound, level, self._primes)


def sieve(x: int, level: int = 1) -> PrimeTable:
    """Sieve the primes up to ``x``; streamed rather than stored above 10^7."""
    if x < 2:
        raise ValueError("sieve bound must be at least 2")
    if x > MATERIALIZE_LIMIT:
        return PrimeTable(x, level, None)
    primes = np.concatenate(list(prime_segments(x)))
    return PrimeTable(x, level, primes)


def first_primes(n: int) -> np.ndarray:
    """The first ``n`` primes."""
    if n < 1:
        return np.zeros(0, dtype=np.int64)
    # Rosser's bound p_n < n (log n + log log n) for n >= 6
    if n < 6:
        bound = 15
    else:
        ln = np.log(n)
        bound = int(n * (ln + np.log(ln))) + 1
    return sieve(bound).primes[:n].copy()


def prime_pi(x: int, level: int = 1) -> int:
    if x < 2:
        return 0
    return sieve(x, level).count()
