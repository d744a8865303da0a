import math

import mpmath as mp
import numpy as np
import pytest
from scipy import integrate

from fisher_ec import quadrature
from fisher_ec.errors import DivergenceError, DomainError
from fisher_ec.fading import (
    FadingParams,
    ccdf,
    cdf,
    inverse_moment_tail,
    pdf,
    sample,
    true_mean,
)

mp.mp.dps = 30

CASES = [(2.5, 1.5, 10.0), (0.5, 2.5, 1.0), (1.0, 5.0, 100.0), (3.5, 1.5, 1e4),
         (0.8, 0.6, 3.0), (1.0 + 1e-12, 2.0, 7.0), (12.0, 30.0, 0.2)]


def mp_cdf(p, x):
    m, ms, s = mp.mpf(p.m), mp.mpf(p.ms), mp.mpf(p.scale)
    u = mp.mpf(x) / s
    return mp.betainc(m, ms, 0, u / (1 + u), regularized=True)


class TestParams:
    @pytest.mark.parametrize("bad", [(0.0, 1, 1), (1, -2, 1), (1, 1, 0), (1e-9, 1, 1),
                                     (1, 1, 2e8), (math.nan, 1, 1), (1, math.inf, 1)])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(DomainError):
            FadingParams(*bad)

    def test_scale_cached(self):
        p = FadingParams(2.5, 1.5, 10.0)
        assert p.scale == 1.5 * 10.0 / 2.5

    def test_true_mean_roundtrip(self):
        p = FadingParams.from_true_mean(3.5, 2.5, 100.0)
        assert true_mean(p) == pytest.approx(100.0, rel=1e-15)

    def test_true_mean_values(self):
        assert true_mean(FadingParams(1.0, 2.5, 1.0)) == pytest.approx(2.5 / 1.5)
        assert true_mean(FadingParams(4.0, 2.0, 3.0)) == pytest.approx(6.0)

    def test_true_mean_diverges(self):
        with pytest.raises(DivergenceError):
            true_mean(FadingParams(2.0, 1.0, 1.0))
        with pytest.raises(DivergenceError):
            FadingParams.from_true_mean(2.0, 0.9, 1.0)


class TestPdf:
    def test_unit_m_at_zero(self):
        assert pdf(FadingParams(1.0, 2.0, 2.0), 0.0) == pytest.approx(0.5, rel=1e-15)

    @pytest.mark.parametrize("m, ms, g", CASES)
    def test_normalised(self, m, ms, g):
        p = FadingParams(m, ms, g)
        # in t = x / (x + scale) the density is t^(m-1) (1-t)^(ms-1) / B; the
        # algebraic end behaviour goes into the quadrature weight
        s = p.scale

        def f(t):
            if t <= 0.0 or t >= 1.0:
                t = min(max(t, 1e-300), 1.0 - 1e-16)
            val = pdf(p, s * t / (1.0 - t))
            if val == 0.0:
                return 0.0
            return val * s * math.exp((1.0 - m) * math.log(t) - (1.0 + ms) * math.log1p(-t))

        total, err = integrate.quad(f, 0.0, 1.0, weight="alg", wvar=(m - 1.0, ms - 1.0),
                                    epsabs=1e-14, epsrel=1e-13, limit=400)
        assert abs(total - 1.0) < 1e-10

    def test_matches_cdf_derivative(self):
        p = FadingParams(2.5, 1.5, 10.0)
        h = 1e-4
        num = (cdf(p, 5.0 + h) - cdf(p, 5.0 - h)) / (2 * h)
        assert abs(pdf(p, 5.0) - num) < 1e-6

    def test_vectorised_and_nonnegative(self):
        p = FadingParams(0.5, 2.5, 1.0)
        x = np.concatenate([[0.0], np.logspace(-12, 12, 500)])
        y = pdf(p, x)
        assert y.shape == x.shape and np.all(y >= 0.0)
        assert y[0] == math.inf

    def test_large_parameters_do_not_overflow(self):
        p = FadingParams(400.0, 500.0, 1e8)
        assert math.isfinite(pdf(p, 1e8)) and pdf(p, 1e8) > 0.0

    def test_negative(self):
        with pytest.raises(DomainError):
            pdf(FadingParams(1.0, 1.0, 1.0), -1.0)


class TestCdf:
    @pytest.mark.parametrize("m, ms, g", CASES)
    @pytest.mark.parametrize("k", [1e-6, 0.1, 0.9, 1.0, 1.1, 7.0, 1e5])
    def test_against_incomplete_beta(self, m, ms, g, k):
        p = FadingParams(m, ms, g)
        x = k * p.scale
        want = mp_cdf(p, x)
        assert abs(cdf(p, x) - float(want)) <= 1e-12 * max(float(want), 1e-300) + 1e-15
        tail = 1 - want
        assert abs(ccdf(p, x) - float(tail)) <= 1e-12 * float(tail) + 1e-15

    @pytest.mark.parametrize("m, ms, g", [(1e-2, 1e3, 1.0), (1e-4, 1e3, 1e-8), (50.0, 0.05, 3.0)])
    @pytest.mark.parametrize("k", [1e-12, 1e-6, 1.0, 1e6])
    def test_extreme_shapes(self, m, ms, g, k):
        p = FadingParams(m, ms, g)
        x = k * p.scale
        want = mp_cdf(p, x)
        assert abs(cdf(p, x) - float(want)) <= 1e-10 * float(want) + 1e-15
        assert abs(ccdf(p, x) - float(1 - want)) <= 1e-10 * float(1 - want) + 1e-15

    def test_zero(self):
        p = FadingParams(2.0, 3.0, 4.0)
        assert cdf(p, 0.0) == 0.0 and ccdf(p, 0.0) == 1.0

    def test_unit_m_closed_form(self):
        p = FadingParams(1.0, 2.0, 1.0)
        assert cdf(p, 2.0) == pytest.approx(0.75, rel=1e-13)
        assert ccdf(p, 2.0) == pytest.approx(0.25, rel=1e-13)
        for ms in (0.5, 1.5, 4.0):
            for g in (0.3, 10.0):
                q = FadingParams(1.0, ms, g)
                for x in (0.01, 1.0, 50.0, 1e4):
                    want = 1.0 - (ms * g / (x + ms * g)) ** ms
                    assert abs(cdf(q, x) - want) < 1e-10

    def test_quadrature_agreement(self):
        p = FadingParams(2.5, 1.5, 10.0)
        assert abs(cdf(p, 8.0) - (1.0 - quadrature.tail_mass(p, 8.0))) < 1e-8
        tail = quadrature.tail_mass(p, 200.0)
        assert abs(ccdf(p, 200.0) / tail - 1.0) < 1e-10

    def test_monotone_and_complementary(self):
        p = FadingParams(0.8, 1.7, 5.0)
        xs = np.logspace(-6, 6, 1000)
        F = np.array([cdf(p, x) for x in xs])
        G = np.array([ccdf(p, x) for x in xs])
        assert np.all(np.diff(F) >= 0.0)
        assert np.max(np.abs(F + G - 1.0)) < 1e-12

    @pytest.mark.parametrize("k", [0.01, 3.0, 1e3])
    def test_scaling(self, k):
        p = FadingParams(2.5, 1.5, 10.0)
        for x in (0.1, 4.0, 300.0):
            assert abs(cdf(p, x) - cdf(p.scaled(k), k * x)) < 1e-12

    def test_far_tail_keeps_relative_accuracy(self):
        p = FadingParams(3.5, 2.5, 1.0)
        x = 1e6
        assert ccdf(p, x) == pytest.approx(float(1 - mp_cdf(p, x)), rel=1e-12)

    def test_negative(self):
        with pytest.raises(DomainError):
            cdf(FadingParams(1.0, 1.0, 1.0), -1e-3)


class TestInverseMoment:
    def test_full_moment(self):
        assert inverse_moment_tail(FadingParams(2.0, 3.0, 4.0), 0.0) == pytest.approx(0.5)

    @pytest.mark.parametrize("m, ms, g", [(2.5, 1.5, 10), (1.5, 8.0, 0.3), (4.0, 2.0, 1e5)])
    def test_full_moment_independent_of_ms(self, m, ms, g):
        p = FadingParams(m, ms, g)
        assert inverse_moment_tail(p, 0.0) * g == pytest.approx(m / (m - 1.0), rel=1e-15)

    def test_diverges_for_small_m(self):
        for m in (0.5, 1.0):
            with pytest.raises(DivergenceError):
                inverse_moment_tail(FadingParams(m, 2.0, 1.0), 0.0)

    def test_quadrature_example(self):
        p = FadingParams(2.5, 1.5, 10.0)
        want = quadrature.inverse_moment(p, 0.5)
        assert inverse_moment_tail(p, 0.5) == pytest.approx(want, rel=1e-9)

    @pytest.mark.parametrize("m, ms, g", CASES)
    @pytest.mark.parametrize("k", [1e-4, 0.3, 1.0, 2.5, 1e4])
    def test_against_quadrature(self, m, ms, g, k):
        p = FadingParams(m, ms, g)
        g0 = k * p.scale
        assert inverse_moment_tail(p, g0) == pytest.approx(quadrature.inverse_moment(p, g0),
                                                           rel=1e-10)

    def test_monotone_and_vanishing(self):
        p = FadingParams(0.5, 2.5, 3.0)
        vals = [inverse_moment_tail(p, g) for g in np.logspace(-6, 9, 200)]
        assert all(b <= a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1e-20

    def test_unit_m_branch_continuous(self):
        g0 = 0.2
        a = inverse_moment_tail(FadingParams(1.0, 2.5, 10.0), g0)
        b = inverse_moment_tail(FadingParams(1.0 + 2e-9, 2.5, 10.0), g0)
        c = inverse_moment_tail(FadingParams(1.0 - 2e-9, 2.5, 10.0), g0)
        assert abs(a - b) < 1e-8 * a and abs(a - c) < 1e-8 * a

    @pytest.mark.parametrize("ms, g, g0", [(2.5, 10.0, 0.2), (30.0, 0.2, 0.01),
                                           (0.6, 1e4, 0.5), (100.0, 1.0, 0.003)])
    @pytest.mark.parametrize("d", [0.0, 1e-12, -1e-9, 1e-6, -1e-3, 0.00999, -0.01001, 0.05])
    def test_near_unit_m(self, ms, g, g0, d):
        m = 1.0 + d
        p = FadingParams(m, ms, g)
        s = mp.mpf(ms) * g / m
        u0 = mp.mpf(g0) / s
        u0 = u0 / (1 + u0)
        want = mp.quad(lambda u: u ** (m - 2) * (1 - u) ** ms, [u0, 0.5, 1]) / (s * mp.beta(m, ms))
        assert inverse_moment_tail(p, g0) == pytest.approx(float(want), rel=2e-12)

    def test_negative(self):
        with pytest.raises(DomainError):
            inverse_moment_tail(FadingParams(2.0, 2.0, 1.0), -1.0)


class TestSampler:
    def test_deterministic(self):
        p = FadingParams(2.5, 1.5, 10.0)
        a, b = sample(p, 123, 1000), sample(p, 123, 1000)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, sample(p, 124, 1000))

    def test_positive(self):
        assert np.all(sample(FadingParams(0.3, 0.4, 1.0), 5, 10_000) > 0.0)

    def test_rejects_empty(self):
        with pytest.raises(DomainError):
            sample(FadingParams(1.0, 1.0, 1.0), 0, 0)

    @pytest.mark.slow
    def test_mean_with_ten_million_draws(self):
        p = FadingParams(2.0, 2.5, 1.0)
        x = sample(p, 2024, 10**7)
        se = x.std(ddof=1) / math.sqrt(x.size)
        assert abs(x.mean() - 2.5 / 1.5) < 3 * se
