"""Band-limited even test functions and their periodizations.

A test function is stored through its Fourier transform f_hat, which is even,
real and supported in [-B, B].  Periodizing f(scale * theta) over the integers
gives a 1-periodic kernel whose Fourier coefficients are
f_hat(l / scale) / scale for |l| <= floor(B * scale), so every kernel used
here is a finite trigonometric polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import floor
from typing import Callable, Optional

import numpy as np
from scipy import integrate

Transform = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Even band-limited function given by its Fourier transform.

    Attributes:
        support: B, with f_hat = 0 outside [-B, B].
        transform: vectorized f_hat.
        spatial: optional closed-form f(t), the inverse transform.
        kind: "fejer", "bump" or "sampled".
        normalized: whether f_hat has been scaled to unit L^2 norm.
        l2_mass: integral of f_hat^2 (after any scaling).
    """

    __test__ = False  # not a pytest class

    support: float
    transform: Transform = field(repr=False)
    spatial: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)
    kind: str = "custom"
    normalized: bool = False
    l2_mass: Optional[float] = None

    def __post_init__(self):
        if not self.support > 0:
            raise ValueError("Fourier support B must be positive")

    def hat(self, xi):
        """f_hat(xi), zero off [-B, B]."""
        xi = np.asarray(xi, dtype=float)
        inside = np.abs(xi) <= self.support
        out = np.zeros_like(xi)
        if np.any(inside):
            out[inside] = self.transform(np.abs(xi[inside]))
        return out[()]

    def __call__(self, t):
        """f(t) = integral of f_hat(xi) e(xi t) d xi."""
        if self.spatial is not None:
            return self.spatial(np.asarray(t, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.array([
            2.0 * integrate.quad(lambda xi: self.hat(xi) * np.cos(2 * np.pi * xi * tt),
                                 0.0, self.support, limit=200)[0]
            for tt in t.ravel()
        ]).reshape(t.shape)
        return out[()] if out.size > 1 else float(out[0])

    def scaled(self, factor: float) -> "TestFunction":
        """factor * f, with the bookkeeping for the L^2 mass."""
        base = self
        spatial = None if base.spatial is None else (lambda t: factor * base.spatial(t))
        mass = None if base.l2_mass is None else factor**2 * base.l2_mass
        return TestFunction(base.support, lambda xi: factor * base.transform(xi), spatial,
                            base.kind, base.normalized, mass)


def make_fejer(B: float, normalized: bool = False) -> TestFunction:
    """Triangle transform max(0, 1 - |xi| / B); f(t) = B sinc^2(B t)."""
    if not B > 0:
        raise ValueError("B must be positive")
    raw = TestFunction(
        support=float(B),
        transform=lambda xi: np.maximum(0.0, 1.0 - np.abs(xi) / B),
        spatial=lambda t: B * np.sinc(B * np.asarray(t, dtype=float)) ** 2,
        kind="fejer",
        l2_mass=2.0 * B / 3.0,
    )
    if not normalized:
        return raw
    out = raw.scaled(np.sqrt(3.0 / (2.0 * B)))
    return TestFunction(out.support, out.transform, out.spatial, "fejer", True, 1.0)


def _bump(xi: np.ndarray, B: float) -> np.ndarray:
    u = np.asarray(xi, dtype=float) / B
    out = np.zeros_like(u)
    inside = np.abs(u) < 1
    out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return out


def make_bump(B: float, normalized: bool = False) -> TestFunction:
    """Smooth compactly supported transform exp(-1 / (1 - (xi / B)^2)) on (-B, B)."""
    if not B > 0:
        raise ValueError("B must be positive")
    mass = 2.0 * integrate.quad(lambda xi: _bump(np.array(xi), B) ** 2, 0.0, B)[0]
    raw = TestFunction(float(B), lambda xi: _bump(xi, B), None, "bump", False, mass)
    if not normalized:
        return raw
    out = raw.scaled(1.0 / np.sqrt(mass))
    return TestFunction(out.support, out.transform, None, "bump", True, 1.0)


def from_samples(B: float, samples, normalized: bool = False) -> TestFunction:
    """Transform sampled at len(samples) uniform points of [0, B], interpolated linearly."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or samples.size < 2:
        raise ValueError("need at least two samples")
    grid = np.linspace(0.0, B, samples.size)

    def transform(xi):
        return np.interp(np.abs(xi), grid, samples)

    # exact integral of the squared piecewise-linear interpolant
    a, b = samples[:-1], samples[1:]
    h = grid[1] - grid[0]
    mass = 2.0 * float(np.sum(h * (a * a + a * b + b * b) / 3.0))
    raw = TestFunction(float(B), transform, None, "sampled", False, mass)
    if not normalized:
        return raw
    out = raw.scaled(1.0 / np.sqrt(mass))
    return TestFunction(out.support, out.transform, None, "sampled", True, 1.0)


def make_kernel(kind: str, B: float, normalized: bool = False) -> TestFunction:
    if kind == "fejer":
        return make_fejer(B, normalized)
    if kind == "bump":
        return make_bump(B, normalized)
    raise ValueError(f"unknown kernel {kind!r} (expected 'fejer' or 'bump')")


def convolution_at_zero(f: TestFunction) -> float:
    """(f * f)(0) = integral of f_hat^2 (Parseval)."""
    if f.l2_mass is not None:
        return float(f.l2_mass)
    return 2.0 * integrate.quad(lambda xi: float(f.hat(xi)) ** 2, 0.0, f.support, limit=200)[0]


@dataclass(frozen=True, eq=False)
class PeriodizedKernel:
    """theta -> sum_n f(scale (theta + n)) as a finite Fourier series.

    Attributes:
        base: the test function f.
        scale: L or pi_N(x).
        coefficients: c_l = f_hat(l / scale) / scale for l = 0..floor(B scale).
    """

    base: TestFunction
    scale: float
    coefficients: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.scale >= 1:
            raise ValueError("scale must be at least 1")
        top = int(floor(self.base.support * self.scale + 1e-12))
        ls = np.arange(top + 1)
        coeffs = np.asarray(self.base.hat(ls / self.scale), dtype=float).reshape(-1) / self.scale
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def cutoff(self) -> int:
        return self.coefficients.size - 1

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        c = self.coefficients
        ls = np.arange(1, c.size)
        flat = theta.reshape(-1)
        out = np.full(flat.shape, c[0])
        if ls.size:
            # bound the phase matrix to about 2^22 entries
            step = max(1, (1 << 22) // ls.size)
            for start in range(0, flat.size, step):
                phase = 2.0 * np.pi * np.multiply.outer(flat[start : start + step], ls)
                out[start : start + step] += 2.0 * np.cos(phase) @ c[1:]
        return out.reshape(theta.shape)[()]

    def lattice_sum(self, theta, terms: int = 50):
        """The defining sum over |n| <= terms, evaluated directly."""
        theta = np.asarray(theta, dtype=float)
        n = np.arange(-terms, terms + 1)
        return np.sum(self.base(self.scale * np.add.outer(theta, n)), axis=-1)[()]

    def mean(self) -> float:
        """Integral over one period, the l = 0 coefficient."""
        return float(self.coefficients[0])


def periodize(f: TestFunction, scale: float) -> PeriodizedKernel:
    return PeriodizedKernel(f, float(scale))


def window_mass_sum(f: TestFunction, L: float, psi: float) -> float:
    """(1 / L) sum_{n=1}^{floor(L B)} f_hat(n / L)^2 (1 + cos(4 pi n psi))."""
    top = int(floor(f.support * L + 1e-12))
    n = np.arange(1, top + 1)
    vals = np.asarray(f.hat(n / L), dtype=float).reshape(-1)
    return float(np.sum(vals**2 * (1.0 + np.cos(4.0 * np.pi * n * psi))) / L)
