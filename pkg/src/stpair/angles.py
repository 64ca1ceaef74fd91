"""Hecke angles, their cosine multiples, and the Sato-Tate measure.

A normalized eigenvalue a in [-2, 2] is written a = 2 cos(pi theta) with
theta in [0, 1].  The cosine multiples A(m) = 2 cos(2 pi m theta) are linear
in the prime-power eigenvalues, A(m) = X_{2m}(a) - X_{2m-2}(a) for m >= 1,
which is what lets family averages of pair statistics be written as traces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt
from typing import Dict, Iterator, Mapping, Optional, Sequence, Tuple

import numpy as np

from .arith.chebyshev import chebyshev_X, chebyshev_X_table
from .errors import DeligneViolation, LevelDividesPrime

DELIGNE_TOL = 1e-9


@dataclass(frozen=True)
class HeckeAngle:
    """An angle theta in [0, 1]; ``eigenvalue`` is 2 cos(pi theta)."""

    theta: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"angle {self.theta} outside [0, 1]")

    @property
    def eigenvalue(self) -> float:
        return 2.0 * np.cos(np.pi * self.theta)


def _check_eigenvalues(a, label: str = "") -> np.ndarray:
    a = np.asarray(a, dtype=float)
    bad = np.abs(a) > 2.0 + DELIGNE_TOL
    if np.any(bad):
        worst = float(np.max(np.abs(a)))
        where = f" in {label}" if label else ""
        raise DeligneViolation(f"|a_p| = {worst} exceeds 2{where}")
    return np.clip(a, -2.0, 2.0)


def angle_from_eigenvalue(a):
    """theta = arccos(a / 2) / pi, vectorized; |a| up to 2 + 1e-9 is clamped."""
    a = _check_eigenvalues(a)
    theta = np.arccos(a / 2.0) / np.pi
    if theta.ndim == 0:
        return HeckeAngle(float(theta))
    return theta


def normalize_eigenvalue(c: int, p: int, k: int, guard_bits: int = 80) -> float:
    """c / p^((k-1)/2) computed exactly, then rounded once to a double."""
    c = int(c)
    if c == 0:
        return 0.0
    scale = p ** (k - 1)
    # floor(sqrt(c^2 2^(2s) / p^(k-1))) carries s guard bits beyond the result
    root = isqrt((c * c << (2 * guard_bits)) // scale)
    value = root / (1 << guard_bits)
    return value if c > 0 else -value


def prime_power_eigenvalue(a_p, m: int):
    """a(p^m) = X_m(a_p), the Hecke recursion a(p^{m+1}) = a(p) a(p^m) - a(p^{m-1})."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    return chebyshev_X(m, a_p)


def cos_multiple(theta, m: int):
    """A(m) = 2 cos(2 pi m theta); equals 2 for m = 0."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    if isinstance(theta, HeckeAngle):
        theta = theta.theta
    return 2.0 * np.cos(2.0 * np.pi * m * np.asarray(theta, dtype=float))[()]


def cos_multiple_from_eigenvalue(a_p, m: int):
    """A(m) through eigenvalues: X_{2m}(a_p) - X_{2m-2}(a_p) for m >= 1, else 2."""
    if m == 0:
        return 2.0 * np.ones_like(np.asarray(a_p, dtype=float))[()]
    return chebyshev_X(2 * m, a_p) - chebyshev_X(2 * m - 2, a_p)


def product_decomposition(m1: int, m2: int, a_p):
    """Right-hand side for (a(p^m1) - a(p^{m1-2})) (a(p^m2) - a(p^{m2-2})).

    The product of two differences at the same prime collapses to at most
    four prime-power eigenvalues; the shape depends on |m1 - m2|.
    """
    if m1 < 1 or m2 < 1:
        raise ValueError("m1, m2 must be at least 1")

    def a(j):
        # a(p^{-1}) = 0 continues the recursion; lower indices never occur
        return chebyshev_X(j, a_p) if j >= -1 else 0.0

    gap = abs(m1 - m2)
    top = m1 + m2
    if gap >= 2:
        return a(top) - a(top - 2) + a(gap) - a(gap - 2)
    if gap == 1:
        return a(top) + a(gap) - a(top - 2)
    return a(2 * m1) - a(2 * m1 - 2) + 2.0


def product_direct(m1: int, m2: int, a_p):
    """Left-hand side of ``product_decomposition`` evaluated term by term."""

    def diff(m):
        return chebyshev_X(m, a_p) - (chebyshev_X(m - 2, a_p) if m >= 1 else 0.0)

    return diff(m1) * diff(m2)


# Expansions of products of cosine multiples at two distinct primes into
# joint eigenvalues a(p^{2i} q^{2j}) = X_{2i}(a_p) X_{2j}(a_q).  Each returns
# a dict {(i, j): coefficient}.


def _cos_to_even(m: int) -> Dict[int, int]:
    """A(m) in the basis a(p^{2i}): {i: coeff}."""
    if m == 0:
        return {0: 2}
    return {m: 1, m - 1: -1} if m >= 1 else {}


def _cos_product_to_even(l: int, n: int) -> Dict[int, int]:
    """A(l) A(n) = A(l + n) + A(|l - n|) in the basis a(p^{2i})."""
    out: Dict[int, int] = {}
    for m in (l + n, abs(l - n)):
        for i, c in _cos_to_even(m).items():
            out[i] = out.get(i, 0) + c
    return {i: c for i, c in out.items() if c}


def _tensor(left: Dict[int, int], right: Dict[int, int]) -> Dict[Tuple[int, int], int]:
    out: Dict[Tuple[int, int], int] = {}
    for i, a in left.items():
        for j, b in right.items():
            out[(i, j)] = out.get((i, j), 0) + a * b
    return {ij: c for ij, c in out.items() if c}


def expand_pn_qn(n: int):
    """A_p(n) A_q(n)."""
    return _tensor(_cos_to_even(n), _cos_to_even(n))


def expand_pl_ql(l: int, lp: int):
    """A_p(l) A_q(l')."""
    return _tensor(_cos_to_even(l), _cos_to_even(lp))


def expand_ql_pn_qn(lp: int, n: int):
    """A_q(l') A_p(n) A_q(n)."""
    return _tensor(_cos_to_even(n), _cos_product_to_even(lp, n))


def expand_pl_pn_qn(l: int, n: int):
    """A_p(l) A_p(n) A_q(n)."""
    return _tensor(_cos_product_to_even(l, n), _cos_to_even(n))


def expand_pl_ql_pn_qn(l: int, lp: int, n: int):
    """A_p(l) A_q(l') A_p(n) A_q(n)."""
    return _tensor(_cos_product_to_even(l, n), _cos_product_to_even(lp, n))


def evaluate_expansion(terms, a_p, a_q) -> float:
    """Sum of c * X_{2i}(a_p) X_{2j}(a_q) over an expansion."""
    top = max(max(i, j) for i, j in terms) if terms else 0
    xp = chebyshev_X_table(2 * top, a_p)
    xq = chebyshev_X_table(2 * top, a_q)
    return sum(c * xp[2 * i] * xq[2 * j] for (i, j), c in terms.items())


def st_density(t):
    """Sato-Tate density 2 sin^2(pi t) on [0, 1]."""
    return 2.0 * np.sin(np.pi * np.asarray(t, dtype=float)) ** 2


def st_cdf(theta):
    """H(theta) = theta - sin(2 pi theta) / (2 pi)."""
    theta = np.asarray(theta, dtype=float)
    return (theta - np.sin(2.0 * np.pi * theta) / (2.0 * np.pi))[()]


def st_cdf_inverse(u, tol: float = 1e-12, max_iter: int = 100):
    """Solve H(theta) = u by safeguarded Newton steps inside a shrinking bracket."""
    u = np.asarray(u, dtype=float)
    if np.any((u < 0) | (u > 1)):
        raise ValueError("u must lie in [0, 1]")
    lo = np.zeros_like(u)
    hi = np.ones_like(u)
    theta = u.copy()
    for _ in range(max_iter):
        resid = st_cdf(theta) - u
        lo = np.where(resid < 0, theta, lo)
        hi = np.where(resid > 0, theta, hi)
        slope = st_density(theta)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = theta - resid / slope
        # fall back to bisection when Newton leaves the bracket (flat ends)
        bad = ~np.isfinite(step) | (step <= lo) | (step >= hi)
        theta_new = np.where(bad, 0.5 * (lo + hi), step)
        theta_new = np.where(resid == 0, theta, theta_new)
        done = np.all(np.abs(st_cdf(theta_new) - u) <= tol)
        theta = theta_new
        if done:
            break
    return theta[()]


def padic_plancherel_density(t, p: int):
    """mu_p(t) = (p + 1) mu_inf(t) / ((p^(1/2) + p^(-1/2))^2 - 4 cos^2(pi t))."""
    t = np.asarray(t, dtype=float)
    denom = (np.sqrt(p) + 1.0 / np.sqrt(p)) ** 2 - 4.0 * np.cos(np.pi * t) ** 2
    return ((p + 1.0) * st_density(t) / denom)[()]


@dataclass(frozen=True, eq=False)
class HeckeAngleSequence:
    """Angles theta_f(p) of one newform, for primes p coprime to the level.

    Attributes:
        level: N.
        weight: k.
        label: free-form identifier.
        primes: ascending int64 array.
        thetas: angles in [0, 1], aligned with ``primes``.
    """

    level: int
    weight: int
    label: str
    primes: np.ndarray = field(repr=False)
    thetas: np.ndarray = field(repr=False)

    def __post_init__(self):
        primes = np.asarray(self.primes, dtype=np.int64)
        thetas = np.asarray(self.thetas, dtype=float)
        if primes.shape != thetas.shape or primes.ndim != 1:
            raise ValueError("primes and thetas must be aligned 1-d arrays")
        if primes.size > 1 and np.any(np.diff(primes) <= 0):
            raise ValueError("primes must be strictly ascending")
        if primes.size and np.any(np.gcd(primes, self.level) != 1):
            bad = int(primes[np.gcd(primes, self.level) != 1][0])
            raise LevelDividesPrime(f"prime {bad} divides the level {self.level}")
        if thetas.size and (np.any(thetas < 0) | np.any(thetas > 1)):
            raise ValueError("angles must lie in [0, 1]")
        primes.setflags(write=False)
        thetas.setflags(write=False)
        object.__setattr__(self, "primes", primes)
        object.__setattr__(self, "thetas", thetas)

    @classmethod
    def from_eigenvalues(
        cls, level: int, weight: int, label: str, primes: Sequence[int], eigenvalues
    ) -> "HeckeAngleSequence":
        a = _check_eigenvalues(eigenvalues, label)
        return cls(level, weight, label, np.asarray(primes), np.arccos(a / 2.0) / np.pi)

    @classmethod
    def from_mapping(
        cls, level: int, weight: int, label: str, angles: Mapping[int, float]
    ) -> "HeckeAngleSequence":
        keys = sorted(angles)
        return cls(level, weight, label, np.array(keys, dtype=np.int64),
                   np.array([angles[p] for p in keys], dtype=float))

    def __len__(self) -> int:
        return int(self.primes.size)

    def __iter__(self) -> Iterator[Tuple[int, HeckeAngle]]:
        for p, t in zip(self.primes, self.thetas):
            yield int(p), HeckeAngle(float(t))

    @property
    def eigenvalues(self) -> np.ndarray:
        return 2.0 * np.cos(np.pi * self.thetas)

    @property
    def straightened(self) -> np.ndarray:
        """H(theta_p), uniformly distributed under Sato-Tate."""
        return st_cdf(self.thetas)

    def upto(self, x: Optional[float]) -> "HeckeAngleSequence":
        """Restriction to p <= x."""
        if x is None:
            return self
        cut = int(np.searchsorted(self.primes, x, side="right"))
        return HeckeAngleSequence(self.level, self.weight, self.label,
                                  self.primes[:cut], self.thetas[:cut])

    def pi_N(self, x: Optional[float] = None) -> int:
        return len(self.upto(x))
