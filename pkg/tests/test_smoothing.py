import numpy as np
import pytest
from scipy import integrate

from stpair.smoothing import (
    PeriodizedKernel,
    convolution_at_zero,
    from_samples,
    make_bump,
    make_fejer,
    make_kernel,
    periodize,
    window_mass_sum,
)


class TestKernels:
    def test_fejer_examples(self):
        f = make_fejer(1.0)
        assert f.hat(0.0) == 1.0
        assert convolution_at_zero(f) == pytest.approx(2 / 3)
        assert convolution_at_zero(make_fejer(2.0)) == pytest.approx(4 / 3)
        assert convolution_at_zero(make_fejer(1.0, normalized=True)) == pytest.approx(1.0)
        assert f.hat(1.5) == 0.0 and f.hat(-0.5) == pytest.approx(0.5)

    def test_fejer_mass_matches_quadrature(self):
        for B in (0.5, 1.0, 3.0):
            f = make_fejer(B)
            q = 2 * integrate.quad(lambda x: float(f.hat(x)) ** 2, 0, B)[0]
            assert q == pytest.approx(convolution_at_zero(f), rel=1e-10)

    def test_fejer_spatial_is_inverse_transform(self):
        f = make_fejer(1.5)
        t = np.array([0.0, 0.1, 0.37, 1.2])
        quad = [2 * integrate.quad(lambda x: float(f.hat(x)) * np.cos(2 * np.pi * x * tt),
                                   0, 1.5)[0] for tt in t]
        assert np.allclose(f(t), quad, atol=1e-10)

    def test_bump(self):
        b = make_bump(1.0, normalized=True)
        assert convolution_at_zero(b) == pytest.approx(1.0)
        assert b.hat(1.0) == 0.0 and b.hat(0.0) > 0
        raw = make_bump(2.0)
        assert raw.hat(0.3) == pytest.approx(raw.hat(-0.3))
        assert float(raw(0.0)) == pytest.approx(
            2 * integrate.quad(lambda x: float(raw.hat(x)), 0, 2.0)[0], rel=1e-8)

    def test_sampled(self):
        s = from_samples(1.0, [1.0, 0.5, 0.0])
        assert s.hat(0.25) == pytest.approx(0.75)
        assert convolution_at_zero(s) == pytest.approx(2 / 3)
        n = from_samples(1.0, np.linspace(1, 0, 9), normalized=True)
        assert convolution_at_zero(n) == pytest.approx(1.0)

    def test_make_kernel(self):
        assert make_kernel("fejer", 1.0).kind == "fejer"
        with pytest.raises(ValueError):
            make_kernel("gauss", 1.0)
        with pytest.raises(ValueError):
            make_fejer(0.0)


class TestPeriodization:
    def test_examples(self):
        f = make_fejer(1.0)
        k = periodize(f, 10.0)
        assert k.mean() == pytest.approx(float(f.hat(0.0)) / 10.0)
        theta = np.linspace(0, 1, 17)
        assert np.allclose(k(theta + 1.0), k(theta))
        one = periodize(f, 1.0)
        assert np.allclose(one(theta), 1.0)

    def test_coefficients(self):
        k = periodize(make_fejer(2.0), 5.0)
        assert k.cutoff == 10
        assert np.allclose(k.coefficients, np.maximum(0, 1 - np.arange(11) / 10.0) / 5.0)

    def test_integral_over_period(self):
        k = periodize(make_bump(1.5), 7.0)
        assert integrate.quad(lambda t: float(k(t)), 0, 1, limit=200)[0] == \
            pytest.approx(k.mean(), rel=1e-9)

    def test_scale_below_one(self):
        with pytest.raises(ValueError):
            PeriodizedKernel(make_fejer(1.0), 0.5)

    def test_lattice_sum_fifty_terms(self):
        # the defining lattice sum truncated at |n| <= 50 against the Fourier series
        grid = np.linspace(0, 1, 1000)
        worst = {}
        for L in (5, 20, 100):
            for B in (1.0, 2.0, 4.0):
                k = periodize(make_fejer(B), L)
                worst[(L, B)] = float(np.max(np.abs(k(grid) - k.lattice_sum(grid, 50))))
        assert max(worst.values()) < 1e-6, worst

    def test_lattice_sum_gap_is_the_tail(self):
        # the |n| <= 50 gap above is the omitted lattice tail, ~ 2 / (pi^2 B L^2 n_max)
        grid = np.linspace(0, 1, 1000)
        for L in (5, 20, 100):
            for B in (1.0, 2.0, 4.0):
                k = periodize(make_fejer(B), L)
                gap = np.max(np.abs(k(grid) - k.lattice_sum(grid, 50)))
                assert gap == pytest.approx(2 / (np.pi**2 * B * L**2 * 50), rel=0.05)

    def test_lattice_sum_converges(self):
        grid = np.linspace(0, 1, 1000)
        for L, terms in ((5, 20000), (20, 2000), (100, 200)):
            for B in (1.0, 2.0, 4.0):
                k = periodize(make_fejer(B), L)
                gap = np.max(np.abs(k(grid) - k.lattice_sum(grid, terms)))
                assert gap < 1e-6, (L, B, gap)


class TestWindowMass:
    @pytest.mark.parametrize("kernel", ["fejer", "bump"])
    def test_limits(self, kernel):
        f = make_kernel(kernel, 1.0)
        mass = convolution_at_zero(f)
        for psi, target in ((0.5, mass), (0.13, mass / 2), (0.25, mass / 2), (0.37, mass / 2)):
            for L in (100, 1000, 10000):
                err = abs(window_mass_sum(f, L, psi) - target)
                assert err <= 3.0 / L, (psi, L, err)
