"""Independent sources of Hecke eigenvalues, used to validate the trace engine.

Nothing here touches class numbers: the forms come from q-expansions
(Delta, Eisenstein series, eta quotients), point counts on the level 11
elliptic curve, and the classical genus/dimension formula for Gamma_0(N).
"""

from __future__ import annotations

from math import gcd
from typing import Dict

import numpy as np

from .qseries import QSeries, delta_qexp, eisenstein_qexp, eta_power_series

# weights where S_k(SL_2(Z)) is one-dimensional, with the exponents (a, b)
# of Delta * E_4^a * E_6^b spanning it
LEVEL_ONE_WEIGHTS: Dict[int, tuple] = {
    12: (0, 0),
    16: (1, 0),
    18: (0, 1),
    20: (2, 0),
    22: (1, 1),
    26: (2, 1),
}


def level_one_newform(weight: int, order: int) -> QSeries:
    """q-expansion of the unique normalized cusp form of level 1 and this weight."""
    if weight not in LEVEL_ONE_WEIGHTS:
        raise ValueError(f"S_{weight}(1) is not one-dimensional")
    a, b = LEVEL_ONE_WEIGHTS[weight]
    form = delta_qexp(order)
    if a:
        form = form * eisenstein_qexp(4, order) ** a
    if b:
        form = form * eisenstein_qexp(6, order)
    return form


def eta_product(exponents: Dict[int, int], order: int) -> QSeries:
    """prod_d eta(d z)^{r_d} as a q-series; needs sum d r_d divisible by 24."""
    weight_shift = sum(d * r for d, r in exponents.items())
    if weight_shift % 24:
        raise ValueError("sum of d * r_d must be a multiple of 24")
    shift = weight_shift // 24
    result = QSeries.one(order)
    for d, r in exponents.items():
        if r < 0:
            raise ValueError("only holomorphic eta products are supported")
        base = eta_power_series(order // d, r)
        stretched = [0] * (order + 1)
        stretched[::d] = base.coeffs
        result = result * QSeries(tuple(stretched))
    return result.shift(shift)


# newforms that happen to be eta products: (level, weight) -> exponents
ETA_NEWFORMS: Dict[tuple, Dict[int, int]] = {
    (2, 8): {1: 8, 2: 8},
    (3, 6): {1: 6, 3: 6},
    (5, 4): {1: 4, 5: 4},
    (6, 4): {1: 2, 2: 2, 3: 2, 6: 2},
    (11, 2): {1: 2, 11: 2},
    (14, 2): {1: 1, 2: 1, 7: 1, 14: 1},
    (15, 2): {1: 1, 3: 1, 5: 1, 15: 1},
}


# y^2 + y = x^3 - x^2 - 10x - 20, the curve of conductor 11
CURVE_11A = (0, -1, 1, -10, -20)


def curve_ap(p: int, coeffs=CURVE_11A) -> int:
    """a_p = p + 1 - #E(F_p) for y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6."""
    a1, a2, a3, a4, a6 = coeffs
    x = np.arange(p, dtype=np.int64)
    if p == 2:
        affine = 0
        for xv in range(2):
            for yv in range(2):
                lhs = yv * yv + a1 * xv * yv + a3 * yv
                rhs = xv**3 + a2 * xv * xv + a4 * xv + a6
                affine += (lhs - rhs) % 2 == 0
        return p - affine
    # complete the square: (2y + a1 x + a3)^2 = 4 rhs + (a1 x + a3)^2
    rhs = (((x * x % p) * x) % p + a2 * (x * x % p) + a4 * x + a6) % p
    disc = (4 * rhs + (a1 * x + a3) ** 2) % p
    squares = np.zeros(p, dtype=np.int64)
    squares[(x * x) % p] = 1
    # solutions in y per x: 1 + legendre(disc)
    legendre = np.where(disc == 0, 0, np.where(squares[disc] == 1, 1, -1))
    affine = int(np.sum(1 + legendre))
    return p - affine


def _factor(n: int) -> Dict[int, int]:
    out: Dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _kronecker_small(disc: int, p: int) -> int:
    """(disc / p) for disc in {-3, -4} and p prime."""
    if disc == -4:
        if p == 2:
            return 0
        return 1 if p % 4 == 1 else -1
    if p == 3:
        return 0
    if p == 2:
        return -1
    return 1 if p % 3 == 1 else -1


def gamma0_cusp_dimension(N: int, k: int) -> int:
    """dim S_k(Gamma_0(N)) for even k >= 2 from the genus and elliptic points."""
    if k % 2 or k < 2:
        raise ValueError("weight must be even and at least 2")
    fac = _factor(N)
    mu = N
    for p in fac:
        mu = mu * (p + 1) // p
    eps2 = 0 if N % 4 == 0 else int(np.prod([1 + _kronecker_small(-4, p) for p in fac]))
    eps3 = 0 if N % 9 == 0 else int(np.prod([1 + _kronecker_small(-3, p) for p in fac]))
    cusps = 0
    for d in range(1, N + 1):
        if N % d == 0:
            g = gcd(d, N // d)
            cusps += sum(1 for a in range(1, g + 1) if gcd(a, g) == 1)
    # genus via Riemann-Hurwitz, kept exact in twelfths
    twelve_genus = 12 + mu - 3 * eps2 - 4 * eps3 - 6 * cusps
    genus = twelve_genus // 12
    if k == 2:
        return genus
    return (k - 1) * (genus - 1) + (k // 2 - 1) * cusps + (k // 4) * eps2 + (k // 3) * eps3


def normalized_level_one_eigenvalues(weight: int, bound: int):
    """(primes, a_p) for the level-1 newform of this weight, p <= bound."""
    from ..angles import normalize_eigenvalue
    from .sieve import sieve

    form = level_one_newform(weight, bound)
    primes = sieve(bound).primes
    values = np.array([normalize_eigenvalue(form[int(p)], int(p), weight) for p in primes])
    return primes, values

