"""Family average of the smoothed pair correlation, computed from Hecke traces.

Written on the cosine side, R_2 for one form is

    c * sum_{p != q} U_p U_q W_pq,   c = 1 / (4 A pi_N^2 L),

with U_p = sum_l u_l A_p(l) and W_pq = sum_n w_n A_p(n) A_q(n).  Expanding
U_p A_p(n) = sum_i x[n, i] a(p^{2i}) turns the whole statistic into the
quadratic form sum_{i,j} K_ij S_ij with K = x^T diag(w) x and
S_ij = sum_{p != q} a(p^{2i} q^{2j}).  The family average of S_ij is a sum of
Hecke traces, so the averaged statistic needs no eigenvalue data at all.

The (i, j) = (0, 0) entry is the leading part; it is also what the
bookkeeping identity S(g, rho) + T(g, rho) reproduces term by term.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from math import floor
from typing import Iterable, Sequence

import numpy as np

from .angles import HeckeAngleSequence
from .arith.sieve import sieve
from . import tracefm
from .errors import MathDomainError, TraceTooLarge, ZeroDimension
from .paircorr import LocalWindow, is_half, smoothed_pair_correlation, smoothing_coefficients
from .smoothing import TestFunction, convolution_at_zero
from .tracefm import TraceEngine


def t_table(n: int, l: int, lp: int) -> int:
    """Constant term of A_p(l) A_q(l') A_p(n) A_q(n) in the joint eigenvalue basis."""
    if min(n, l, lp) < 1:
        raise ValueError("n, l, l' must be at least 1")
    if n == l == lp:
        return 4
    if (abs(n - l) == 1 and lp == n) ^ (l == n and abs(n - lp) == 1):
        return -2
    if abs(n - l) == 1 and abs(n - lp) == 1:
        return 1
    return 0


def _kernel_values(g: TestFunction, rho: TestFunction, w: LocalWindow, pi_x: float):
    L = w.L

    def r(i):
        return float(rho.hat(i / L))

    def gh(i):
        return float(g.hat(i / pi_x))

    def c(i):
        return 2.0 * np.cos(2.0 * np.pi * i * w.psi)

    return r, gh, c


def leading_prefactor(w: LocalWindow, pi_x: float) -> float:
    """pi (pi - 1) / (2 A pi^2 L)."""
    return float(pi_x * (pi_x - 1) / (2.0 * w.A * pi_x**2 * w.L))


def leading_S(g: TestFunction, rho: TestFunction, w: LocalWindow, pi_x: float) -> float:
    """Six-term constant from the parts with at most one cosine sum per prime.

    The last term is taken as printed in the source bookkeeping, without the
    factor 2 cos(2 pi psi) its derivation carries; ``s_correction`` restores it.
    """
    r, gh, c = _kernel_values(g, rho, w, pi_x)
    return float(
        8 * gh(0) * r(0) ** 2
        - 8 * gh(0) * r(0) * r(1) * c(1)
        + 4 * gh(1) * r(0) ** 2
        + 2 * gh(0) * r(1) ** 2 * c(1) ** 2
        + 4 * gh(1) * r(0) * r(2) * c(2)
        - 8 * r(0) * r(1) * gh(1)
    )


def s_correction(g: TestFunction, rho: TestFunction, w: LocalWindow, pi_x: float) -> float:
    """prefactor * (S with the cosine on its last term - S as printed)."""
    r, gh, c = _kernel_values(g, rho, w, pi_x)
    return float(leading_prefactor(w, pi_x) * (-8 * r(0) * r(1) * gh(1) * (c(1) - 1.0)))


def leading_T(g: TestFunction, rho: TestFunction, w: LocalWindow, pi_x: float) -> float:
    """Six finite sums over n <= floor(L B) + 1 with shifted kernel arguments."""
    L = w.L
    top = int(floor(L * rho.support + 1e-12))
    n = np.arange(0, top + 3)
    r = np.asarray(rho.hat(n / L), dtype=float).reshape(-1)
    gh = np.asarray(g.hat(n / pi_x), dtype=float).reshape(-1)
    c = 2.0 * np.cos(2.0 * np.pi * n * w.psi)

    def block(lo, hi, f):
        idx = np.arange(lo, hi + 1)
        return float(np.sum(f(idx))) if idx.size else 0.0

    return (
        block(2, top + 1, lambda i: gh[i] * r[i - 1] ** 2 * c[i - 1] ** 2)
        + block(1, top - 1, lambda i: gh[i] * r[i + 1] ** 2 * c[i + 1] ** 2)
        + 2 * block(2, top - 1, lambda i: gh[i] * r[i - 1] * r[i + 1] * c[i - 1] * c[i + 1])
        + 4 * block(1, top, lambda i: gh[i] * r[i] ** 2 * c[i] ** 2)
        - 4 * block(1, top - 1, lambda i: gh[i] * r[i] * r[i + 1] * c[i] * c[i + 1])
        - 4 * block(2, top, lambda i: gh[i] * r[i] * r[i - 1] * c[i] * c[i - 1])
    )


def predicted_limit(w: LocalWindow, g: TestFunction, rho: TestFunction,
                    rescaled_window: bool = False) -> float:
    """C_psi g_hat(0) (rho * rho)(0); with the window scaled by C_psi, g_hat(0) (rho * rho)(0)."""
    base = float(g.hat(0.0)) * convolution_at_zero(rho)
    return base if rescaled_window else float(w.C_psi * base)


def C_psi(psi: float) -> float:
    A = 2.0 * np.sin(np.pi * psi) ** 2
    return (4.0 if is_half(psi) else 2.0) * A


@dataclass(frozen=True)
class AveragedR2Breakdown:
    """Family-averaged R_2 split into the leading bookkeeping and the rest.

    Attributes:
        prefactor: pi (pi - 1) / (2 A pi^2 L).
        leading_S, leading_T: the two constants multiplying the prefactor.
        trivial_term: prefactor * 8 g_hat(0) rho_hat(0)^2, the first term of
            leading_S shown on its own (it is already inside leading_S).
        s_correction: restores the cosine factor on the last term of leading_S.
        remainder: every contribution from joint eigenvalues with (i, j) != (0, 0).
        total: the full averaged statistic.
        predicted_limit: C_psi g_hat(0) (rho * rho)(0).
    """

    prefactor: float
    leading_S: float
    leading_T: float
    trivial_term: float
    s_correction: float
    remainder: float
    total: float
    predicted_limit: float
    pi_N: int
    L: float
    psi: float
    dimension: int

    @property
    def leading(self) -> float:
        return self.prefactor * (self.leading_S + self.leading_T)

    @property
    def closure_error(self) -> float:
        """|leading + s_correction + remainder - total|, relative to |total|."""
        gap = self.leading + self.s_correction + self.remainder - self.total
        return abs(gap) / max(abs(self.total), 1e-300)

    def as_dict(self) -> dict:
        out = asdict(self)
        out["leading"] = self.leading
        out["ratio_to_limit"] = (self.total / self.predicted_limit
                                 if self.predicted_limit else float("nan"))
        return out


def quadratic_form(w: LocalWindow, pi_n: int, rho: TestFunction, g: TestFunction) -> np.ndarray:
    """K with R_2 = c sum_ij K_ij S_ij, S_ij = sum_{p != q} a(p^{2i} q^{2j})."""
    u, wn = smoothing_coefficients(w, pi_n, rho, g)
    return _quadratic_form(u, wn)


def _quadratic_form(u: np.ndarray, wn: np.ndarray) -> np.ndarray:
    l_top, n_top = u.size - 1, wn.size - 1
    top = l_top + n_top
    # y[n, m]: U_p A_p(n) = sum_m y[n, m] A_p(m), from A(l) A(n) = A(l + n) + A(|l - n|)
    y = np.zeros((n_top + 1, top + 2))
    ls = np.arange(l_top + 1)
    for n in range(n_top + 1):
        y[n, n : n + l_top + 1] += u
        np.add.at(y[n], np.abs(ls - n), u)
    # A(0) = 2 a(p^0), A(m) = a(p^{2m}) - a(p^{2m-2})
    x = y[:, :-1] - y[:, 1:]
    x[:, 0] = 2.0 * y[:, 0] - y[:, 1]
    return x.T @ (wn[:, None] * x)


def _pairwise_sum(values: np.ndarray) -> float:
    """Fixed-order tree reduction of a flat array."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        return 0.0
    while v.size > 1:
        if v.size % 2:
            v = np.append(v, 0.0)
        v = v[0::2] + v[1::2]
    return float(v[0])


def averaged_joint_moments(engine: TraceEngine, primes: Sequence[int], top: int) -> np.ndarray:
    """S_ij = <sum_{p != q} a_f(p^{2i} q^{2j})> for 0 <= i, j <= top."""
    d = engine.newspace_dimension()
    if d == 0:
        raise ZeroDimension(f"no newforms at level {engine.level}, weight {engine.weight}")
    primes = [int(p) for p in primes]
    if d > 1 and len(primes) >= 2:
        # the reduction needs Tr T_{p^d} and Tr T_{p^c q^e} for c, e < d
        big = sorted(primes)[-2:]
        need = max(big[1] ** d, (big[0] * big[1]) ** (d - 1))
        if need > tracefm.DIRECT_LIMIT:
            raise TraceTooLarge(
                f"a {d}-dimensional family at primes up to {big[1]} needs traces at n = {need}, "
                f"beyond {tracefm.DIRECT_LIMIT}"
            )
    R = [engine.normalized_reduction(p, top) for p in primes]
    if d == 1:
        M = np.stack([r[:, 0] for r in R])
        col = M.sum(axis=0)
        return np.outer(col, col) - M.T @ M
    S = np.zeros((top + 1, top + 1))
    for a_idx, p in enumerate(primes):
        for b_idx, q in enumerate(primes):
            if p == q:
                continue
            G = np.array([[engine.normalized_power_moment(p, a, q, b) for b in range(d)]
                          for a in range(d)])
            S += R[a_idx] @ G @ R[b_idx].T
    return S / d


def averaged_R2_via_traces(engine: TraceEngine, x: float, w: LocalWindow,
                           g: TestFunction, rho: TestFunction,
                           transpose: bool = False) -> AveragedR2Breakdown:
    """<R_2(g, rho)(f)> over the newforms of the engine's space, from traces only."""
    d = engine.newspace_dimension()
    if d == 0:
        raise ZeroDimension(f"no newforms at level {engine.level}, weight {engine.weight}")
    primes = sieve(max(int(x), 2), engine.level).primes if x >= 2 else np.zeros(0, np.int64)
    pi_n = int(primes.size)
    if pi_n < 2:
        raise MathDomainError("need at least two primes up to x coprime to the level")
    K = quadratic_form(w, pi_n, rho, g)
    top = K.shape[0] - 1
    S = averaged_joint_moments(engine, primes, top)
    if transpose:
        S = S.T
    c = 1.0 / (4.0 * w.A * pi_n**2 * w.L)
    terms = K * S
    total = c * _pairwise_sum(terms)
    rest = terms.copy()
    rest[0, 0] = 0.0
    remainder = c * _pairwise_sum(rest)
    P = leading_prefactor(w, pi_n)
    return AveragedR2Breakdown(
        prefactor=P,
        leading_S=leading_S(g, rho, w, pi_n),
        leading_T=leading_T(g, rho, w, pi_n),
        trivial_term=P * 8.0 * float(g.hat(0.0)) * float(rho.hat(0.0)) ** 2,
        s_correction=s_correction(g, rho, w, pi_n),
        remainder=remainder,
        total=total,
        predicted_limit=predicted_limit(w, g, rho),
        pi_N=pi_n,
        L=w.L,
        psi=w.psi,
        dimension=d,
    )


def averaged_R2_brute(family: Iterable[HeckeAngleSequence], x: float, w: LocalWindow,
                      g: TestFunction, rho: TestFunction, method: str = "fourier") -> float:
    """Mean of the per-form smoothed statistic over an explicit family."""
    values = [smoothed_pair_correlation(f, x, w, rho, g, method) for f in family]
    if not values:
        raise ValueError("family is empty")
    return float(np.mean(values))


def iid_expectation(w: LocalWindow, pi_n: int, g: TestFunction, rho: TestFunction) -> float:
    """Exact mean of R_2 over i.i.d. Sato-Tate angles: only the (0, 0) entry survives."""
    u, wn = smoothing_coefficients(w, pi_n, rho, g)
    # column 0 of the X-basis matrix: y[n, 0] and y[n, 1] only see l = n and l = n +- 1
    rows = min(wn.size, u.size + 1)
    padded = np.zeros(rows + 1)
    padded[: min(u.size, rows + 1)] = u[: rows + 1]
    n = np.arange(rows)
    y0 = padded[n] * np.where(n == 0, 2.0, 1.0)
    y1 = padded[n + 1] + np.where(n >= 1, padded[np.maximum(n - 1, 0)], 0.0)
    y1[0] = 2.0 * padded[1]
    if rows > 1:
        y1[1] += padded[0]
    x0 = 2.0 * y0 - y1
    return float(np.sum(wn[:rows] * x0**2)) * pi_n * (pi_n - 1) / (4.0 * w.A * pi_n**2 * w.L)
