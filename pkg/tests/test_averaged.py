import math

import numpy as np
import pytest

from stpair.angles import HeckeAngleSequence
from stpair.arith import sieve
from stpair.averaged import (
    C_psi,
    averaged_R2_brute,
    averaged_R2_via_traces,
    iid_expectation,
    leading_prefactor,
    leading_S,
    leading_T,
    predicted_limit,
    quadratic_form,
    s_correction,
    t_table,
)
from stpair.errors import TraceTooLarge, ZeroDimension
from stpair.io import newform_sequence, synth_family, synth_sato_tate
from stpair.paircorr import LocalWindow, smoothed_pair_correlation
from stpair.smoothing import from_samples, make_fejer, make_kernel
from stpair.tracefm import TraceEngine

ONE_DIM = [(1, 12), (1, 16), (1, 18), (1, 20), (1, 22), (1, 26), (11, 2)]


class TestTTable:
    def test_examples(self):
        assert t_table(2, 2, 2) == 4
        assert t_table(2, 1, 2) == -2
        assert t_table(2, 1, 3) == 1
        assert t_table(5, 1, 9) == 0

    def test_partition_and_symmetry(self):
        for n in range(1, 31):
            for l in range(1, 31):
                for lp in range(1, 31):
                    v = t_table(n, l, lp)
                    assert v == t_table(n, lp, l)
                    four = n == l == lp
                    minus_two = (abs(n - l) == 1 and lp == n) ^ (l == n and abs(n - lp) == 1)
                    one = abs(n - l) == 1 and abs(n - lp) == 1
                    assert four + minus_two + one <= 1
                    want = 4 if four else -2 if minus_two else 1 if one else 0
                    assert v == want

    def test_domain(self):
        with pytest.raises(ValueError):
            t_table(0, 1, 1)


def _S_oracle(rho, g, psi, L, pi):
    """Six printed terms, evaluated with math.cos and scalar kernel calls."""
    r0, r1, r2 = (float(rho.hat(i / L)) for i in range(3))
    g0, g1 = float(g.hat(0)), float(g.hat(1 / pi))
    c1, c2 = 2 * math.cos(2 * math.pi * psi), 2 * math.cos(4 * math.pi * psi)
    return (8 * g0 * r0 * r0 - 8 * g0 * r0 * r1 * c1 + 4 * g1 * r0 * r0
            + 2 * g0 * r1 * r1 * c1 * c1 + 4 * g1 * r0 * r2 * c2 - 8 * r0 * r1 * g1)


def _T_oracle(rho, g, psi, L, pi):
    top = math.floor(L * rho.support + 1e-12)

    def r(i):
        return float(rho.hat(i / L))

    def gh(i):
        return float(g.hat(i / pi))

    def c(i):
        return 2 * math.cos(2 * math.pi * i * psi)

    total = 0.0
    for n in range(2, top + 2):
        total += gh(n) * (r(n - 1) * c(n - 1)) ** 2
    for n in range(1, top):
        total += gh(n) * (r(n + 1) * c(n + 1)) ** 2
    for n in range(2, top):
        total += 2 * gh(n) * r(n - 1) * r(n + 1) * c(n - 1) * c(n + 1)
    for n in range(1, top + 1):
        total += 4 * gh(n) * (r(n) * c(n)) ** 2
    for n in range(1, top):
        total -= 4 * gh(n) * r(n) * r(n + 1) * c(n) * c(n + 1)
    for n in range(2, top + 1):
        total -= 4 * gh(n) * r(n) * r(n - 1) * c(n) * c(n - 1)
    return total


class TestLeadingTerms:
    def test_S_zero(self):
        zero = from_samples(1.0, [0.0, 0.0])
        assert leading_S(make_fejer(1), zero, LocalWindow(0.5, 4), 100) == 0.0

    def test_S_quarter_drops_cosines(self):
        rho, g = make_fejer(1.0), make_fejer(1.0)
        w = LocalWindow(0.25, 10)
        r0, r1, r2 = 1.0, 0.9, 0.8
        g0, g1 = 1.0, 0.99
        # 2 cos(2 pi psi) = 0 and 2 cos(4 pi psi) = -2
        assert leading_S(g, rho, w, 100) == pytest.approx(
            8 * g0 * r0**2 + 4 * g1 * r0**2 - 8 * g1 * r0 * r2 - 8 * r0 * r1 * g1)

    def test_S_term_oracle(self):
        rho, g = make_fejer(1.0), make_fejer(1.0)
        w = LocalWindow(1 / 3, 10)
        assert leading_S(g, rho, w, 100) == pytest.approx(_S_oracle(rho, g, 1 / 3, 10, 100),
                                                          rel=1e-14)

    @pytest.mark.parametrize("kind", ["fejer", "bump"])
    @pytest.mark.parametrize("psi", [0.3, 1 / 3, 0.5])
    def test_T_term_oracle(self, kind, psi):
        rho, g = make_kernel(kind, 1.5), make_kernel(kind, 0.7)
        w = LocalWindow(psi, 9)
        assert leading_T(g, rho, w, 50) == pytest.approx(_T_oracle(rho, g, psi, 9, 50),
                                                         rel=1e-12)

    def test_T_small_support(self):
        # B L = 1 with a flat transform: only rho_hat(0), rho_hat(1/L) are nonzero
        rho = from_samples(0.25, [1.0, 1.0])
        g = make_fejer(1.0)
        w = LocalWindow(0.5, 4)
        pi = 100
        c1 = 2 * math.cos(2 * math.pi * 0.5)
        want = float(g.hat(2 / pi)) * c1**2 + 4 * float(g.hat(1 / pi)) * c1**2
        assert leading_T(g, rho, w, pi) == pytest.approx(want)

    @pytest.mark.parametrize("kind", ["fejer", "bump"])
    @pytest.mark.parametrize("psi", [0.25, 1 / 3, 0.5])
    def test_T_limit_halving(self, kind, psi):
        rho, g = make_kernel(kind, 1.0), make_kernel(kind, 1.0)
        pi = 1e12
        errs = []
        for L in (250, 500, 1000, 2000):
            w = LocalWindow(psi, L)
            value = leading_prefactor(w, pi) * leading_T(g, rho, w, pi)
            errs.append(abs(value / predicted_limit(w, g, rho) - 1))
        for a, b in zip(errs, errs[1:]):
            assert a / b == pytest.approx(2.0, rel=0.2)

    def test_predicted_limit(self):
        assert C_psi(0.5) == pytest.approx(8.0)
        assert C_psi(0.25) == pytest.approx(2.0)
        rho, g = make_fejer(1.0, True), make_fejer(1.0)
        assert predicted_limit(LocalWindow(0.5, 4), g, rho, rescaled_window=True) == \
            pytest.approx(1.0)
        assert predicted_limit(LocalWindow(0.25, 5), g, rho) == pytest.approx(2.0)
        assert predicted_limit(LocalWindow(0.5, 5), g, rho) / \
            predicted_limit(LocalWindow(0.25, 5), g, rho) == pytest.approx(4.0)


@pytest.fixture(scope="module")
def kernels():
    return make_fejer(1.0), make_fejer(1.0)


class TestTracePath:
    @pytest.mark.parametrize("N,k", ONE_DIM)
    def test_matches_brute(self, N, k, kernels):
        rho, g = kernels
        x = 1000
        form = newform_sequence(N, k, x)
        for psi, L in ((0.25, 5), (1 / 3, 4.5), (0.5, 3)):
            w = LocalWindow(psi, L)
            trace = averaged_R2_via_traces(TraceEngine(N, k), x, w, g, rho).total
            brute = averaged_R2_brute([form], x, w, g, rho)
            assert trace == pytest.approx(brute, rel=1e-8)

    def test_zero_kernels(self):
        zero = from_samples(1.0, [0.0, 0.0])
        b = averaged_R2_via_traces(TraceEngine(1, 12), 200, LocalWindow(0.5, 4), zero, zero)
        assert b.total == 0.0

    def test_constant_block(self):
        # B_g pi < 1 and B_rho L < 1: only the l = n = 0 term survives
        w = LocalWindow(0.5, 4)
        rho = make_fejer(0.2)
        x = 50
        pi = sieve(x).count()
        g = make_fejer(0.9 / pi)
        b = averaged_R2_via_traces(TraceEngine(1, 12), x, w, g, rho)
        assert b.remainder == pytest.approx(0.0, abs=1e-15)
        assert b.total == pytest.approx(b.trivial_term, rel=1e-12)
        assert b.total == pytest.approx(b.prefactor * 8 * float(g.hat(0)) * float(rho.hat(0)) ** 2)

    @pytest.mark.parametrize("N,k,x,psi", [(1, 12, 300, 0.25), (1, 24, 150, 1 / 3),
                                           (11, 4, 100, 0.5), (7, 6, 30, 0.3)])
    def test_bookkeeping_closes(self, N, k, x, psi, kernels):
        rho, g = kernels
        b = averaged_R2_via_traces(TraceEngine(N, k), x, LocalWindow(psi, 6), g, rho)
        assert b.closure_error <= 1e-10
        assert b.leading + b.s_correction == pytest.approx(
            b.total - b.remainder, rel=1e-10)

    def test_swap_symmetry(self, kernels):
        rho, g = kernels
        w = LocalWindow(0.4, 5)
        for N, k, x in ((1, 12, 200), (1, 24, 120), (1, 36, 30), (5, 8, 30)):
            e = TraceEngine(N, k)
            a = averaged_R2_via_traces(e, x, w, g, rho).total
            b = averaged_R2_via_traces(e, x, w, g, rho, transpose=True).total
            assert a == pytest.approx(b, rel=1e-12)

    def test_multi_dimensional_against_brute(self, kernels):
        # S_24(1): eigenforms f1 + c f2 with f1 = Delta E_4^3 = q + ..., f2 = Delta^2 = q^2 + ...,
        # whose T_2 eigenvalues are 540 +- 12 sqrt(144169)
        from stpair.arith import delta_qexp, eisenstein_qexp

        rho, g = kernels
        x = 150
        d = delta_qexp(x)
        f1 = d * eisenstein_qexp(4, x) ** 3
        f2 = d * d
        primes = sieve(x).primes
        forms = []
        for sign in (1, -1):
            lam = 540 + sign * 12 * math.sqrt(144169)
            c = lam - f1[2]
            ap = [(f1[int(p)] + c * f2[int(p)]) / float(p) ** 11.5 for p in primes]
            forms.append(HeckeAngleSequence.from_eigenvalues(1, 24, f"24.{sign}", primes, ap))
        w = LocalWindow(0.37, 5)
        trace = averaged_R2_via_traces(TraceEngine(1, 24), x, w, g, rho).total
        brute = averaged_R2_brute(forms, x, w, g, rho)
        assert trace == pytest.approx(brute, rel=1e-7)

    def test_multi_dimensional_range(self, kernels):
        rho, g = kernels
        with pytest.raises(TraceTooLarge):
            averaged_R2_via_traces(TraceEngine(1, 36), 1000, LocalWindow(0.5, 4), g, rho)

    def test_zero_dimension(self, kernels):
        rho, g = kernels
        with pytest.raises(ZeroDimension):
            averaged_R2_via_traces(TraceEngine(1, 10), 100, LocalWindow(0.5, 4), g, rho)


class TestMonteCarlo:
    def test_singleton_family(self, kernels):
        rho, g = kernels
        seq = synth_sato_tate(100, seed=4)
        w = LocalWindow(0.5, 4)
        assert averaged_R2_brute([seq], 10**4, w, g, rho) == \
            smoothed_pair_correlation(seq, 10**4, w, rho, g)
        with pytest.raises(ValueError):
            averaged_R2_brute([], 10**4, w, g, rho)

    def test_iid_expectation(self, kernels):
        rho, g = kernels
        primes = sieve(400).primes
        w = LocalWindow(1 / 3, 6)
        family = synth_family(1000, primes.size, seed=9, primes=primes)
        values = [smoothed_pair_correlation(f, 400, w, rho, g) for f in family]
        mean, sem = np.mean(values), np.std(values, ddof=1) / np.sqrt(len(values))
        assert abs(mean - iid_expectation(w, primes.size, g, rho)) <= 4 * sem

    def test_iid_expectation_approaches_limit(self, kernels):
        rho, g = kernels
        # the window edge costs O(1 / L) and the finite prime count O(L / pi)
        pi_n = 10**6
        for psi in (0.25, 1 / 3, 0.5):
            for L in (50, 200, 800, 3200):
                w = LocalWindow(psi, L)
                err = abs(iid_expectation(w, pi_n, g, rho) / predicted_limit(w, g, rho) - 1)
                assert err <= 3 / L + 3 * L / pi_n, (psi, L, err)
                assert err < 0.01

    def test_quadratic_form_symmetric(self, kernels):
        rho, g = kernels
        K = quadratic_form(LocalWindow(0.3, 7), 120, rho, g)
        assert np.allclose(K, K.T)

    def test_s_correction_vanishes_at_zero_cosine(self, kernels):
        rho, g = kernels
        # 2 cos(2 pi psi) = 1 at psi = 1/6
        assert s_correction(g, rho, LocalWindow(1 / 6, 7), 100) == pytest.approx(0.0, abs=1e-14)
