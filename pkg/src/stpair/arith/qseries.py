"""Truncated power series in q with exact integer coefficients.

Multiplication packs each operand into one big integer (Kronecker
substitution) and lets GMP do the convolution, which keeps expansions to
order 10^5 practical.  These series serve as independent oracles for the
trace formula: Delta, E_4, E_6 and eta quotients.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

from gmpy2 import mpz


@dataclass(frozen=True)
class QSeries:
    """sum_{n <= order} coeffs[n] q^n, exact modulo q^(order + 1)."""

    coeffs: Tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise ValueError("a series needs at least the constant term")

    @classmethod
    def from_list(cls, coeffs: Sequence[int], order: int = None) -> "QSeries":
        coeffs = [int(c) for c in coeffs]
        if order is None:
            order = len(coeffs) - 1
        coeffs = coeffs[: order + 1] + [0] * (order + 1 - len(coeffs))
        return cls(tuple(coeffs))

    @classmethod
    def one(cls, order: int) -> "QSeries":
        return cls.from_list([1], order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> int:
        return self.coeffs[n]

    def __len__(self) -> int:
        return len(self.coeffs)

    def truncate(self, order: int) -> "QSeries":
        return QSeries.from_list(self.coeffs, min(order, self.order))

    def __add__(self, other: "QSeries") -> "QSeries":
        m = min(self.order, other.order)
        return QSeries(tuple(a + b for a, b in zip(self.coeffs[: m + 1], other.coeffs)))

    def __neg__(self) -> "QSeries":
        return QSeries(tuple(-a for a in self.coeffs))

    def __sub__(self, other: "QSeries") -> "QSeries":
        return self + (-other)

    def scale(self, c: int) -> "QSeries":
        return QSeries(tuple(c * a for a in self.coeffs))

    def shift(self, k: int) -> "QSeries":
        """Multiply by q^k, keeping the order."""
        return QSeries.from_list([0] * k + list(self.coeffs[: len(self) - k]), self.order)

    def __mul__(self, other: "QSeries") -> "QSeries":
        m = min(self.order, other.order)
        return QSeries(tuple(_kronecker_mul(self.coeffs[: m + 1], other.coeffs[: m + 1], m)))

    def __pow__(self, e: int) -> "QSeries":
        if e < 0:
            raise ValueError("negative powers are not supported")
        result = QSeries.one(self.order)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def substitute(self, m: int) -> "QSeries":
        """f(q) -> f(q^m), same order."""
        out = [0] * (self.order + 1)
        for n in range(0, self.order // m + 1):
            out[n * m] = self.coeffs[n]
        return QSeries(tuple(out))


def _pack(coeffs, bits: int) -> mpz:
    """sum c_i 2^(bits i) for signed c_i."""
    pos = bytearray()
    neg = bytearray()
    width = bits // 8
    for c in coeffs:
        if c >= 0:
            pos += int(c).to_bytes(width, "little")
            neg += bytes(width)
        else:
            pos += bytes(width)
            neg += int(-c).to_bytes(width, "little")
    return mpz(int.from_bytes(pos, "little")) - mpz(int.from_bytes(neg, "little"))


def _kronecker_mul(a, b, order: int):
    bound = max(map(abs, a), default=0) * max(map(abs, b), default=0)
    bound *= min(len(a), len(b))
    if bound == 0:
        return [0] * (order + 1)
    bits = (int(bound).bit_length() + 2 + 7) // 8 * 8
    width = bits // 8
    prod = _pack(a, bits) * _pack(b, bits)
    # offset every digit by 2^(bits-1) so the signed digits read off without borrows
    n_digits = len(a) + len(b) - 1
    offset = mpz(int.from_bytes((b"\x00" * (width - 1) + b"\x80") * n_digits, "little"))
    raw = int(prod + offset).to_bytes(n_digits * width, "little")
    half = 1 << (bits - 1)
    out = []
    for i in range(order + 1):
        out.append(int.from_bytes(raw[i * width : (i + 1) * width], "little") - half)
    return out


def eta_power_series(order: int, r: int = 1) -> QSeries:
    """prod_{n>=1} (1 - q^n)^r (no q^(1/24) prefactor)."""
    if r == 3:
        # Jacobi: prod (1 - q^n)^3 = sum_k (-1)^k (2k + 1) q^(k(k+1)/2)
        c = [0] * (order + 1)
        k = 0
        while k * (k + 1) // 2 <= order:
            c[k * (k + 1) // 2] = (-1) ** k * (2 * k + 1)
            k += 1
        return QSeries(tuple(c))
    # Euler's pentagonal number theorem
    c = [0] * (order + 1)
    k = 0
    while True:
        hit = False
        for g in ((k * (3 * k - 1)) // 2, (k * (3 * k + 1)) // 2):
            if g <= order:
                c[g] = (-1) ** k
                hit = True
        if not hit:
            break
        k += 1
    base = QSeries(tuple(c))
    if r == 1:
        return base
    if r % 3 == 0 and r > 0:
        return eta_power_series(order, 3) ** (r // 3)
    return base**r


def delta_qexp(order: int) -> QSeries:
    """Delta = q prod (1 - q^n)^24, coefficients tau(n) for n <= order."""
    if order < 1:
        raise ValueError("order must be at least 1")
    body = eta_power_series(order - 1, 3) ** 8
    return QSeries.from_list([0] + list(body.coeffs), order)


def divisor_sigma_table(order: int, power: int):
    out = [0] * (order + 1)
    for d in range(1, order + 1):
        dp = d**power
        for m in range(d, order + 1, d):
            out[m] += dp
    return out


def eisenstein_qexp(weight: int, order: int) -> QSeries:
    """Normalized E_4 = 1 + 240 sum sigma_3(n) q^n or E_6 = 1 - 504 sum sigma_5(n) q^n."""
    if weight == 4:
        c, power = 240, 3
    elif weight == 6:
        c, power = -504, 5
    else:
        raise ValueError("only weights 4 and 6 are supported")
    sig = divisor_sigma_table(order, power)
    return QSeries(tuple([1] + [c * s for s in sig[1:]]))
