"""Pair correlation of Hecke angles: sharp counts, local windows, smoothed sums.

Pairs are ordered (p != q counted twice) and every comparison is a closed
inequality, so the Poisson benchmark is exactly 2s.  Thresholds are tested
on the floating-point difference H_j - H_i of sorted values, identically in
the fast counter and in the quadratic reference loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, log
from typing import Optional, Tuple

import numpy as np

from .angles import HeckeAngleSequence, st_cdf
from .errors import ConfigError, EmptyWindow
from .smoothing import TestFunction, periodize


def default_L(x: float) -> int:
    """L(x) = max(2, round(log log x))."""
    if x <= np.e:
        return 2
    return max(2, int(round(log(log(x)))))


def is_half(psi) -> bool:
    """Exact test psi == 1/2 (floats compared through their exact rational value)."""
    return Fraction(psi) == Fraction(1, 2)


@dataclass(frozen=True)
class LocalWindow:
    """The interval [psi - 1/L, psi + 1/L] inside (0, 1).

    Attributes:
        psi: centre, 0 < psi < 1.
        L: inverse half-width, L >= 2.
    """

    psi: float
    L: float

    def __post_init__(self):
        if not 0.0 < self.psi < 1.0:
            raise ConfigError(f"psi={self.psi} must lie strictly between 0 and 1")
        if not self.L >= 2:
            raise ConfigError(f"L={self.L} must be at least 2")
        lo, hi = self.interval
        if lo <= 0.0 or hi >= 1.0:
            raise ConfigError(
                f"window [{lo}, {hi}] around psi={self.psi} with L={self.L} leaves (0, 1)"
            )

    @property
    def interval(self) -> Tuple[float, float]:
        return (self.psi - 1.0 / self.L, self.psi + 1.0 / self.L)

    @property
    def A(self) -> float:
        """Sato-Tate density at psi, 2 sin^2(pi psi)."""
        return float(2.0 * np.sin(np.pi * self.psi) ** 2)

    @property
    def C_psi(self) -> float:
        return (4.0 if is_half(self.psi) else 2.0) * self.A

    def contains(self, theta) -> np.ndarray:
        lo, hi = self.interval
        theta = np.asarray(theta, dtype=float)
        return (theta >= lo) & (theta <= hi)


@dataclass(frozen=True, eq=False)
class PairCorrReport:
    """An evaluated pair correlation curve.

    Attributes:
        s: ascending grid.
        values: R(s) on the grid.
        pair_counts: raw ordered-pair counts per grid point.
        count: number of points entering the statistic (pi_N(x) or the window count).
        pi_N: primes up to x coprime to the level.
        L, A: window data (None for the global statistic).
        kind: global, local, rescaled or smoothed.
    """

    s: np.ndarray
    values: np.ndarray
    pair_counts: np.ndarray
    count: int
    pi_N: int
    kind: str
    L: Optional[float] = None
    A: Optional[float] = None
    label: str = ""

    def predicted(self) -> np.ndarray:
        return 2.0 * self.s


def _sorted_values(values) -> np.ndarray:
    return np.sort(np.asarray(values, dtype=float))


def count_close_pairs(values, threshold) -> np.ndarray:
    """Ordered pairs i != j with |v_i - v_j| <= t, for each t in ``threshold``.

    Sort, then for each i find the last j with v_j - v_i <= t by binary search
    and correct the handful of positions where the rounded difference disagrees
    with the rounded comparison value.
    """
    v = _sorted_values(values)
    thresholds = np.atleast_1d(np.asarray(threshold, dtype=float))
    n = v.size
    out = np.zeros(thresholds.shape, dtype=np.int64)
    if n < 2:
        return out
    idx = np.arange(n)
    for k, t in enumerate(thresholds):
        if t < 0:
            continue
        j = np.searchsorted(v, v + t, side="right") - 1
        j = np.maximum(j, idx)
        # fl(v_j - v_i) can differ from the exact comparison with fl(v_i + t)
        while True:
            nxt = np.minimum(j + 1, n - 1)
            grow = (nxt > j) & (v[nxt] - v <= t)
            if not np.any(grow):
                break
            j = np.where(grow, nxt, j)
        while True:
            shrink = (j > idx) & (v[j] - v > t)
            if not np.any(shrink):
                break
            j = np.where(shrink, j - 1, j)
        out[k] = 2 * int(np.sum(j - idx))
    return out


def count_close_pairs_naive(values, threshold) -> np.ndarray:
    """Quadratic reference: compare every ordered pair after sorting."""
    v = _sorted_values(values)
    thresholds = np.atleast_1d(np.asarray(threshold, dtype=float))
    diffs = v[None, :] - v[:, None]
    upper = np.triu(np.ones((v.size, v.size), dtype=bool), k=1)
    d = diffs[upper]
    return np.array([2 * int(np.sum(d <= t)) for t in thresholds], dtype=np.int64)


def _grid(s_grid) -> np.ndarray:
    s = np.asarray(s_grid, dtype=float)
    if s.ndim != 1 or (s.size > 1 and np.any(np.diff(s) < 0)):
        raise ConfigError("s-grid must be a one-dimensional ascending sequence")
    return s


def _counter(naive: bool):
    return count_close_pairs_naive if naive else count_close_pairs


def count_in_window(seq: HeckeAngleSequence, x: float, w: LocalWindow) -> int:
    """Number of p <= x with theta_p in the closed window."""
    sub = seq.upto(x)
    return int(np.sum(w.contains(sub.thetas)))


def global_pair_correlation(seq: HeckeAngleSequence, x: float, s_grid,
                            naive: bool = False) -> PairCorrReport:
    """R(s) = #{p != q : |H_p - H_q| <= s / pi_N} / pi_N."""
    sub = seq.upto(x)
    pi_n = len(sub)
    if pi_n < 2:
        raise EmptyWindow("global pair correlation needs at least two angles")
    s = _grid(s_grid)
    counts = _counter(naive)(sub.straightened, s / pi_n)
    return PairCorrReport(s, counts / pi_n, counts, pi_n, pi_n, "global", label=seq.label)


def local_pair_correlation(seq: HeckeAngleSequence, x: float, w: LocalWindow, s_grid,
                           naive: bool = False) -> PairCorrReport:
    """Pairs inside the window with |H_p - H_q| <= 2s / (L count), divided by count."""
    sub = seq.upto(x)
    inside = sub.thetas[w.contains(sub.thetas)]
    m = inside.size
    if m < 2:
        raise EmptyWindow(f"window around psi={w.psi} holds {m} angle(s)")
    s = _grid(s_grid)
    counts = _counter(naive)(st_cdf(inside), 2.0 * s / (w.L * m))
    return PairCorrReport(s, counts / m, counts, m, len(sub), "local", w.L, w.A, seq.label)


def rescaled_local_pair_correlation(seq: HeckeAngleSequence, x: float, w: LocalWindow,
                                    s_grid, naive: bool = False) -> PairCorrReport:
    """(L / (2 A pi_N)) #{p != q in window : |theta_p - theta_q| <= s / (A^2 pi_N)}."""
    sub = seq.upto(x)
    pi_n = len(sub)
    inside = sub.thetas[w.contains(sub.thetas)]
    m = inside.size
    if m < 2:
        raise EmptyWindow(f"window around psi={w.psi} holds {m} angle(s)")
    s = _grid(s_grid)
    A = w.A
    counts = _counter(naive)(inside, s / (A * A * pi_n))
    values = counts * w.L / (2.0 * A * pi_n)
    return PairCorrReport(s, values, counts, m, pi_n, "rescaled", w.L, A, seq.label)


# -- smoothed statistic --------------------------------------------------------


def smoothing_coefficients(w: LocalWindow, pi_n: int, rho: TestFunction, g: TestFunction):
    """Cosine-side weights (u_l, w_n).

    With A(m) = 2 cos(2 pi m theta) and A(0) = 2, the window factor at one
    prime is sum_l u_l A_p(l) and the pair factor is sum_n w_n A_p(n) A_q(n).
    """
    L = w.L
    l_top = int(floor(rho.support * L + 1e-12))
    n_top = int(floor(g.support * pi_n + 1e-12))
    ls = np.arange(l_top + 1)
    u = np.asarray(rho.hat(ls / L), dtype=float).reshape(-1) * 2.0 * np.cos(2.0 * np.pi * ls * w.psi)
    u[0] = float(rho.hat(0.0))
    ns = np.arange(n_top + 1)
    wn = 2.0 * np.asarray(g.hat(ns / pi_n), dtype=float).reshape(-1)
    wn[0] = float(g.hat(0.0))
    return u, wn


def smoothed_prefactor(w: LocalWindow, pi_n: int) -> float:
    return 1.0 / (4.0 * w.A * pi_n**2 * w.L)


def _smoothed_direct(thetas, w: LocalWindow, pi_n: int, rho, g) -> float:
    """Kernel side: both signs at each prime, all four sign patterns in G."""
    rho_L = periodize(rho, w.L)
    G = periodize(g, pi_n)
    # both signs of theta inside the window kernel
    s_rho = rho_L(thetas - w.psi) + rho_L(-thetas - w.psi)
    plus = np.add.outer(thetas, thetas)
    minus = np.subtract.outer(thetas, thetas)
    s_g = 2.0 * G(plus) + 2.0 * G(minus)
    pair = np.outer(s_rho, s_rho) * s_g
    total = float(np.sum(pair) - np.trace(pair))
    return total * w.L / (4.0 * w.A * pi_n)


def _smoothed_fourier(thetas, w: LocalWindow, pi_n: int, rho, g) -> float:
    """Cosine side: R = c sum_n w_n [(sum_p Y_p(n))^2 - sum_p Y_p(n)^2]."""
    u, wn = smoothing_coefficients(w, pi_n, rho, g)
    ls = np.arange(u.size)
    ns = np.arange(wn.size)
    cos_l = 2.0 * np.cos(2.0 * np.pi * np.outer(thetas, ls))
    cos_n = 2.0 * np.cos(2.0 * np.pi * np.outer(thetas, ns))
    U = cos_l @ u
    Y = U[:, None] * cos_n
    col = Y.sum(axis=0)
    total = float(np.sum(wn * (col**2 - np.sum(Y * Y, axis=0))))
    return float(total * smoothed_prefactor(w, pi_n))


def smoothed_pair_correlation(seq: HeckeAngleSequence, x: float, w: LocalWindow,
                              rho: TestFunction, g: TestFunction,
                              method: str = "fourier") -> float:
    """R_2(g, rho) for one form, by kernel evaluation or on the cosine side."""
    sub = seq.upto(x)
    pi_n = len(sub)
    if pi_n < 1:
        return 0.0
    thetas = sub.thetas
    if method == "direct":
        return _smoothed_direct(thetas, w, pi_n, rho, g)
    if method == "fourier":
        return _smoothed_fourier(thetas, w, pi_n, rho, g)
    raise ConfigError(f"unknown method {method!r}")


def weyl_sum(seq: HeckeAngleSequence, x: float, m: int) -> Tuple[float, float]:
    """(Re, Im) of (1 / pi_N) sum_p e(m theta_p)."""
    sub = seq.upto(x)
    pi_n = len(sub)
    if pi_n == 0:
        raise EmptyWindow("no primes up to x")
    if m == 0:
        return 1.0, 0.0
    phase = 2.0 * np.pi * m * sub.thetas
    return float(np.sum(np.cos(phase)) / pi_n), float(np.sum(np.sin(phase)) / pi_n)


@dataclass(frozen=True, eq=False)
class SpacingDistribution:
    """Consecutive gaps of sorted H-values, scaled by pi_N."""

    gaps: np.ndarray = field(repr=False)
    pi_N: int

    def cdf(self, t) -> np.ndarray:
        g = np.sort(self.gaps)
        return (np.searchsorted(g, np.asarray(t, dtype=float), side="right") / g.size)[()]

    def ks_exponential(self) -> float:
        """Kolmogorov-Smirnov distance to 1 - exp(-t)."""
        from scipy import stats

        return float(stats.kstest(self.gaps, "expon").statistic)


def spacings_of(values, scale: int) -> SpacingDistribution:
    v = _sorted_values(values)
    if v.size < 3:
        raise EmptyWindow("level spacings need at least three values")
    return SpacingDistribution(np.diff(v) * scale, int(scale))


def level_spacings(seq: HeckeAngleSequence, x: float) -> SpacingDistribution:
    sub = seq.upto(x)
    return spacings_of(sub.straightened, len(sub))
