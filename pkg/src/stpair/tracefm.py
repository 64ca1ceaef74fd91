"""Hecke traces on S_k(Gamma_0(N)) for squarefree N from the Eichler-Selberg formula.

For (n, N) = 1 the trace of T_n is a sum of four pieces: an identity term
(n a square), an elliptic term over t^2 < 4n weighted by class numbers of
the orders of discriminant t^2 - 4n, a hyperbolic term over the divisors of
n, and sigma(n) in weight 2.  Traces on the new subspace follow by sieving
over the divisors of N.  Everything is exact integer/rational arithmetic.

Joint traces T_{p^i q^j} with exponents far beyond what the formula can
reach directly are obtained inside the Hecke algebra: the characteristic
polynomial of T_p on the newspace is recovered from the traces of
T_{p^0}, ..., T_{p^d}, and T_{p^i} is reduced modulo it.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Dict, List, Optional, Tuple

import numpy as np

from .arith.classnum import HurwitzCache
from .errors import BadWeight, NonSquarefreeLevel, NotCoprime, TraceTooLarge, ZeroDimension

# largest n evaluated straight from the formula (the class number table is 4n)
DIRECT_LIMIT = 2_500_000


def _prime_factors(n: int) -> List[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _is_squarefree(n: int) -> bool:
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


def _divisors(n: int) -> List[int]:
    small = [d for d in range(1, isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def _psi(N: int) -> int:
    out = N
    for p in _prime_factors(N):
        out = out // p * (p + 1)
    return out


def _euler_phi(N: int) -> int:
    out = N
    for p in _prime_factors(N):
        out = out // p * (p - 1)
    return out


def _root_count(t: int, n: int, modulus: int, residues: int) -> int:
    """#{x mod residues : x^2 - t x + n = 0 mod modulus}."""
    return sum(1 for x in range(residues) if (x * x - t * x + n) % modulus == 0)


def validate_level_weight(N: int, k: int) -> None:
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise NonSquarefreeLevel(f"level must be a positive integer, got {N}")
    if not _is_squarefree(N):
        raise NonSquarefreeLevel(f"level {N} is not squarefree")
    if k < 2 or k % 2:
        raise BadWeight(f"weight must be an even integer >= 2, got {k}")


@dataclass(frozen=True)
class FamilyMoment:
    """Family average of a(p^{2a} q^{2b}) over the newforms of level N, weight k."""

    N: int
    k: int
    p: int
    q: int
    a: int
    b: int
    value: float


class TraceEngine:
    """Exact trace evaluator for one (level, weight).

    Queries are memoized.  The memo tables and the class number cache are
    guarded by a lock, so a single engine may be shared between threads.
    """

    def __init__(self, level: int, weight: int, hurwitz: Optional[HurwitzCache] = None):
        validate_level_weight(level, weight)
        self.level = int(level)
        self.weight = int(weight)
        self._hurwitz = hurwitz if hurwitz is not None else HurwitzCache(1024)
        self._lock = threading.RLock()
        self._full: Dict[Tuple[int, int], int] = {}
        self._new: Dict[int, int] = {}
        self._charpoly: Dict[int, List[int]] = {}
        self._powers: Dict[int, List[List[int]]] = {}
        self._reduced: Dict[int, List[List[int]]] = {}
        self._joint_small: Dict[Tuple[int, int, int, int], int] = {}
        self._level_primes = _prime_factors(self.level)

    def __repr__(self) -> str:
        return f"TraceEngine(level={self.level}, weight={self.weight})"

    @property
    def hurwitz(self) -> HurwitzCache:
        return self._hurwitz

    def _check_n(self, n: int) -> None:
        if n < 1:
            raise ValueError("n must be a positive integer")
        if gcd(n, self.level) != 1:
            raise NotCoprime(f"n={n} is not coprime to the level {self.level}")

    def _ensure_hurwitz(self, bound: int) -> HurwitzCache:
        with self._lock:
            if bound > self._hurwitz.bound:
                self._hurwitz = HurwitzCache(max(bound, 2 * self._hurwitz.bound))
            return self._hurwitz

    # -- the formula --------------------------------------------------------

    def fullspace_trace(self, n: int, level: Optional[int] = None) -> int:
        """Tr T_n on S_k(Gamma_0(M)), M = ``level`` (a divisor of N) or N."""
        M = self.level if level is None else int(level)
        if self.level % M:
            raise ValueError(f"{M} does not divide the level {self.level}")
        self._check_n(n)
        key = (M, n)
        with self._lock:
            if key in self._full:
                return self._full[key]
        if n > DIRECT_LIMIT:
            raise TraceTooLarge(f"n={n} is beyond the direct trace range {DIRECT_LIMIT}")
        value = self._eichler_selberg(M, n)
        with self._lock:
            self._full[key] = value
        return value

    def _eichler_selberg(self, M: int, n: int) -> int:
        k = self.weight
        cache = self._ensure_hurwitz(4 * n)
        primes = [p for p in self._level_primes if M % p == 0]
        psi_M = _psi(M)
        total = Fraction(0)

        # identity term
        r = isqrt(n)
        if r * r == n:
            total += Fraction((k - 1) * psi_M * r ** (k - 2), 12)

        # elliptic term; P(t) = (rho^{k-1} - rhobar^{k-1}) / (rho - rhobar)
        elliptic = Fraction(0)
        t = 0
        while t * t < 4 * n:
            disc = 4 * n - t * t
            prev, cur = 0, 1
            for _ in range(k - 2):
                prev, cur = cur, t * cur - n * prev
            if not primes:
                inner = Fraction(cache.twelve_h(disc), 12)
            else:
                inner = Fraction(0)
                for f in cache.conductor_divisors(disc):
                    weight = 1
                    for ell in primes:
                        if f % ell:
                            weight *= _root_count(t, n, ell, ell)
                        else:
                            weight *= (ell + 1) * _root_count(t, n, ell * ell, ell)
                        if not weight:
                            break
                    if weight:
                        inner += Fraction(weight * cache.primitive_twelve_h(disc // (f * f)), 12)
            term = cur * inner
            elliptic += term if t == 0 else 2 * term
            t += 1
        total -= elliptic / 2

        # hyperbolic term
        cusp_weight = 2 ** len(primes)
        hyper = sum(min(d, n // d) ** (k - 1) for d in _divisors(n))
        total -= Fraction(hyper * cusp_weight, 2)

        if k == 2:
            total += sum(_divisors(n))
        if total.denominator != 1:
            raise ArithmeticError(f"non-integral trace {total} at M={M}, n={n}")
        return int(total)

    def newspace_trace(self, n: int) -> int:
        """Tr T_n on the newforms of level N (squarefree N, (n, N) = 1)."""
        self._check_n(n)
        with self._lock:
            if n in self._new:
                return self._new[n]
        value = 0
        for M in _divisors(self.level):
            nu = len(_prime_factors(self.level // M))
            value += (-2) ** nu * self.fullspace_trace(n, M)
        with self._lock:
            self._new[n] = value
        return value

    def newspace_dimension(self) -> int:
        return self.newspace_trace(1)

    def normalized_newspace_trace(self, n: int) -> float:
        """sum_f a_f(n) = Tr T_n / n^((k-1)/2), rounded once."""
        from .angles import normalize_eigenvalue

        c = self.newspace_trace(n)
        return normalize_eigenvalue(c, n, self.weight)

    # -- Hecke algebra reduction ---------------------------------------------

    def _power_basis(self, p: int, top: int) -> List[List[int]]:
        """Row m: coefficients of T_p^m in the basis T_{p^0}, ..., T_{p^m}."""
        scale = p ** (self.weight - 1)
        with self._lock:
            rows = self._powers.get(p)
            if rows is not None and len(rows) > top:
                return rows
        rows = [[1]]
        for m in range(top):
            prev = rows[-1]
            nxt = [0] * (m + 2)
            # T_p T_{p^j} = T_{p^{j+1}} + p^{k-1} T_{p^{j-1}}
            for j, c in enumerate(prev):
                if not c:
                    continue
                nxt[j + 1] += c
                if j >= 1:
                    nxt[j - 1] += scale * c
            rows.append(nxt)
        with self._lock:
            self._powers[p] = rows
        return rows

    def characteristic_polynomial(self, p: int) -> List[int]:
        """Integer coefficients [1, e_1, ..., e_d] of det(x - T_p) on the newspace,
        as x^d - e_1 x^{d-1} + e_2 x^{d-2} - ..."""
        self._check_n(p)
        with self._lock:
            if p in self._charpoly:
                return self._charpoly[p]
        d = self.newspace_dimension()
        if d == 0:
            raise ZeroDimension(f"no newforms at level {self.level}, weight {self.weight}")
        if p**d > DIRECT_LIMIT:
            raise TraceTooLarge(f"T_{p} on a {d}-dimensional space needs Tr T_{p}^{d}")
        rows = self._power_basis(p, d)
        traces = [self.newspace_trace(p**j) for j in range(d + 1)]
        power_sums = [sum(c * traces[j] for j, c in enumerate(rows[m])) for m in range(d + 1)]
        # Newton: m e_m = sum_{i=1}^m (-1)^{i-1} e_{m-i} s_i
        e = [1]
        for m in range(1, d + 1):
            acc = sum((-1) ** (i - 1) * e[m - i] * power_sums[i] for i in range(1, m + 1))
            if acc % m:
                raise ArithmeticError("non-integral characteristic polynomial")
            e.append(acc // m)
        with self._lock:
            self._charpoly[p] = e
        return e

    def _reduction(self, p: int, top: int) -> List[List[int]]:
        """Row m: T_{p^m} as a polynomial of degree < d in T_p, for m <= top."""
        with self._lock:
            rows = self._reduced.get(p)
            if rows is not None and len(rows) > top:
                return rows
        e = self.characteristic_polynomial(p)
        d = len(e) - 1
        scale = p ** (self.weight - 1)
        # x^d = sum_{i=1}^d (-1)^{i-1} e_i x^{d-i} modulo the characteristic polynomial
        tail = [0] * d
        for i in range(1, d + 1):
            tail[d - i] = (-1) ** (i - 1) * e[i]

        def times_x(v):
            out = [0] + v[:-1]
            lead = v[-1]
            if lead:
                out = [a + lead * c for a, c in zip(out, tail)]
            return out

        rows = [[1] + [0] * (d - 1)]
        prev = [0] * d
        while len(rows) <= top:
            cur = rows[-1]
            step = times_x(cur)
            nxt = [a - scale * b for a, b in zip(step, prev)]
            prev = cur
            rows.append(nxt)
        with self._lock:
            self._reduced[p] = rows
        return rows

    def _small_joint(self, p: int, a: int, q: int, b: int) -> int:
        """Tr(T_p^a T_q^b) on the newspace, from direct traces at p^c q^e."""
        key = (p, a, q, b)
        with self._lock:
            if key in self._joint_small:
                return self._joint_small[key]
        rp = self._power_basis(p, a)[a]
        rq = self._power_basis(q, b)[b]
        value = 0
        for c, x in enumerate(rp):
            if not x:
                continue
            for e_, y in enumerate(rq):
                if y:
                    value += x * y * self.newspace_trace(p**c * q**e_)
        with self._lock:
            self._joint_small[key] = value
        return value

    def joint_trace(self, p: int, i: int, q: int, j: int) -> int:
        """Tr T_{p^i q^j} on the newspace for distinct primes p, q."""
        if p == q:
            raise ValueError("p and q must be distinct")
        n_direct = p**i * q**j
        if n_direct <= DIRECT_LIMIT:
            return self.newspace_trace(n_direct)
        rp = self._reduction(p, i)[i]
        rq = self._reduction(q, j)[j]
        value = 0
        for a, x in enumerate(rp):
            if not x:
                continue
            for b, y in enumerate(rq):
                if y:
                    value += x * y * self._small_joint(p, a, q, b)
        return value

    def prime_power_trace(self, p: int, i: int) -> int:
        """Tr T_{p^i} on the newspace."""
        if p**i <= DIRECT_LIMIT:
            return self.newspace_trace(p**i)
        rp = self._reduction(p, i)[i]
        return sum(x * self._power_trace(p, a) for a, x in enumerate(rp) if x)

    def _power_trace(self, p: int, a: int) -> int:
        rows = self._power_basis(p, a)
        return sum(c * self.newspace_trace(p**j) for j, c in enumerate(rows[a]) if c)

    def family_moment(self, p: int, q: int, a: int, b: int) -> FamilyMoment:
        """<a_f(p^{2a} q^{2b})> over the newforms, exact up to one final rounding."""
        if p == q:
            raise ValueError("p and q must be distinct")
        self._check_n(p * q)
        d = self.newspace_dimension()
        if d == 0:
            raise ZeroDimension(f"no newforms at level {self.level}, weight {self.weight}")
        if a == 0 and b == 0:
            return FamilyMoment(self.level, self.weight, p, q, 0, 0, 1.0)
        tr = self.joint_trace(p, 2 * a, q, 2 * b)
        k = self.weight
        norm = p ** (a * (k - 1)) * q ** (b * (k - 1))
        return FamilyMoment(self.level, self.weight, p, q, a, b, tr / (norm * d))

    # -- per-prime data for the averaged statistic ---------------------------

    def normalized_reduction(self, p: int, top: int) -> np.ndarray:
        """R[i, a] with a(p^{2i}) = sum_a R[i, a] (T_p / p^((k-1)/2))^a, i <= top."""
        k = self.weight
        rows = self._reduction(p, 2 * top)
        d = len(rows[0])
        out = np.empty((top + 1, d))
        for i in range(top + 1):
            row = rows[2 * i]
            for a in range(d):
                # a(p^{2i}) carries p^{-i(k-1)}; (T_p normalized)^a carries p^{-a(k-1)/2}.
                # int / int true division rounds once without a gcd
                num = row[a] * p ** (a // 2 * (k - 1))
                value = num / p ** (i * (k - 1))
                if a % 2:
                    value *= p ** ((k - 1) / 2)
                out[i, a] = value
        return out

    def normalized_power_moment(self, p: int, a: int, q: int, b: int) -> float:
        """Tr((T_p / p^((k-1)/2))^a (T_q / q^((k-1)/2))^b) on the newspace."""
        from .angles import normalize_eigenvalue

        k = self.weight
        tr = self._small_joint(p, a, q, b)
        # p^(a(k-1)/2) q^(b(k-1)/2): take the integer part exactly, the rest as a root
        if a % 2 == 0 and b % 2 == 0:
            return tr / (p ** (a // 2 * (k - 1)) * q ** (b // 2 * (k - 1)))
        return normalize_eigenvalue(tr, p**a * q**b, k)


_engines: Dict[Tuple[int, int], TraceEngine] = {}
_engines_lock = threading.Lock()


def get_engine(N: int, k: int) -> TraceEngine:
    """Shared engine per (N, k)."""
    with _engines_lock:
        engine = _engines.get((N, k))
        if engine is None:
            engine = TraceEngine(N, k)
            _engines[(N, k)] = engine
        return engine


def fullspace_trace(N: int, k: int, n: int) -> Fraction:
    """Trace of T_n on S_k(Gamma_0(N)) as an exact rational."""
    return Fraction(get_engine(N, k).fullspace_trace(n))


def newspace_trace(N: int, k: int, n: int) -> Fraction:
    return Fraction(get_engine(N, k).newspace_trace(n))


def normalized_newspace_trace(N: int, k: int, n: int) -> float:
    return get_engine(N, k).normalized_newspace_trace(n)


def newspace_dimension(N: int, k: int) -> int:
    return get_engine(N, k).newspace_dimension()


def family_moment(N: int, k: int, p: int, q: int, a: int, b: int) -> FamilyMoment:
    return get_engine(N, k).family_moment(p, q, a, b)


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"
