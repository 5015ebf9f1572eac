import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special, stats

from obfusgame.dp import (
    chi_square_cdf,
    epsilon_from_sigma,
    gaussian_perturb,
    norm_bound_probability,
    regularized_lower_gamma,
    sigma_from_epsilon,
)


class TestEpsilonFromSigma:
    def test_log_equals_one_anchor(self):
        # delta = 1.25 e^{-1} makes the log exactly 1; sigma = 2 sqrt(2) gives eps = 1
        delta = 1.25 * math.exp(-1)
        g = epsilon_from_sigma(2 * math.sqrt(2), delta)
        assert g.epsilon == pytest.approx(1.0, abs=1e-12)

    def test_calculator_value(self):
        g = epsilon_from_sigma(5.0745, 0.05)
        assert g.epsilon == pytest.approx(1.0000, abs=1e-4)

    def test_inverse_proportionality(self):
        a = epsilon_from_sigma(3.0, 0.1).epsilon
        b = epsilon_from_sigma(6.0, 0.1).epsilon
        assert a == pytest.approx(2 * b, rel=1e-14)

    def test_zero_sigma_gives_infinity(self):
        g = epsilon_from_sigma(0.0, 0.1)
        assert math.isinf(g.epsilon)
        assert not g.in_stated_range

    def test_out_of_range_flag(self):
        assert not epsilon_from_sigma(0.5, 0.05).epsilon < 1
        assert not epsilon_from_sigma(0.5, 0.05).in_stated_range
        assert epsilon_from_sigma(50.0, 0.05).in_stated_range

    def test_delta_domain(self):
        with pytest.raises(ValueError):
            epsilon_from_sigma(1.0, 1.25)
        with pytest.raises(ValueError):
            epsilon_from_sigma(1.0, 0.0)


class TestSigmaFromEpsilon:
    def test_anchor(self):
        delta = 1.25 * math.exp(-1)
        assert sigma_from_epsilon(1.0, delta) == pytest.approx(2 * math.sqrt(2), rel=1e-14)

    def test_half_epsilon_doubles_sigma(self):
        assert sigma_from_epsilon(0.5, 0.05) == pytest.approx(10.149, abs=1e-3)

    def test_round_trip(self):
        rng = np.random.Generator(np.random.PCG64(3))
        for _ in range(1000):
            eps = float(rng.uniform(0.01, 5.0))
            delta = float(rng.uniform(1e-6, 0.999))
            sigma = sigma_from_epsilon(eps, delta)
            back = epsilon_from_sigma(sigma, delta).epsilon
            assert abs(back - eps) <= 1e-9 * eps

    def test_zero_epsilon_rejected(self):
        with pytest.raises(ValueError):
            sigma_from_epsilon(0.0, 0.1)


class TestGaussianPerturb:
    def test_zero_sigma_identity(self):
        x = np.arange(5.0)
        out = gaussian_perturb(x, 0.0, seed=1)
        assert np.array_equal(out, x)
        assert out is not x

    def test_seed_reproducibility(self):
        x = np.zeros(100)
        a = gaussian_perturb(x, 2.0, seed=42)
        b = gaussian_perturb(x, 2.0, seed=42)
        assert np.array_equal(a, b)
        c = gaussian_perturb(x, 2.0, seed=43)
        assert not np.array_equal(a, c)

    def test_moments(self):
        n = 1_000_000
        noise = gaussian_perturb(np.zeros(n), 2.0, seed=0)
        assert abs(noise.mean()) < 4 * 2.0 / math.sqrt(n)
        assert noise.var() == pytest.approx(4.0, rel=0.02)

    def test_streams_uncorrelated(self):
        a = gaussian_perturb(np.zeros(100_000), 1.0, seed=1)
        b = gaussian_perturb(np.zeros(100_000), 1.0, seed=2)
        assert abs(np.corrcoef(a, b)[0, 1]) < 0.02


class TestChiSquareCdf:
    def test_d2_closed_form(self):
        zeta = 2 * math.log(2)
        assert chi_square_cdf(2, zeta) == pytest.approx(0.5, abs=1e-12)
        for z in (0.1, 1.0, 5.0, 20.0):
            assert chi_square_cdf(2, z) == pytest.approx(1 - math.exp(-z / 2), abs=1e-12)

    def test_at_zero(self):
        assert chi_square_cdf(2, 0.0) == 0.0

    def test_chi2_5_median(self):
        assert chi_square_cdf(5, 4.351) == pytest.approx(0.5, abs=5e-3)

    def test_large_zeta_limit(self):
        assert chi_square_cdf(2, 60.0) > 1 - 1e-12

    def test_against_scipy(self):
        for d in (1, 2, 3, 5, 10, 50):
            for zeta in (0.01, 0.5, 1.0, d / 2, d, 2 * d, 5 * d):
                mine = chi_square_cdf(d, zeta)
                ref = float(stats.chi2.cdf(zeta, d))
                assert abs(mine - ref) < 1e-10

    def test_regularized_gamma_against_scipy(self):
        rng = np.random.Generator(np.random.PCG64(5))
        for _ in range(500):
            a = float(rng.uniform(0.05, 30))
            x = float(rng.uniform(0, 60))
            assert abs(regularized_lower_gamma(a, x) - float(special.gammainc(a, x))) < 1e-10

    @given(st.integers(1, 20), st.floats(0, 50), st.floats(0, 50))
    def test_monotone_in_zeta(self, d, z1, z2):
        lo, hi = sorted((z1, z2))
        assert 0.0 <= chi_square_cdf(d, lo) <= chi_square_cdf(d, hi) <= 1.0

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            chi_square_cdf(2, -1.0)
        with pytest.raises(ValueError):
            chi_square_cdf(0, 1.0)


class TestNormBoundProbability:
    def test_hand_substitution(self):
        report = norm_bound_probability(2, 2 * math.log(2), 1.0, 1.0, 0.1)
        assert report.probability == pytest.approx(0.5, abs=1e-12)
        assert report.combined_success == pytest.approx(0.95, abs=1e-12)
        assert report.union_bound_success == pytest.approx(0.4, abs=1e-12)

    def test_union_bound_never_exceeds_product_form(self):
        for zeta in (0.5, 2.0, 10.0):
            r = norm_bound_probability(5, zeta, 1.0, 2.0, 0.2)
            assert r.union_bound_success <= r.combined_success

    def test_monte_carlo_oracle(self):
        sigma_L, sigma_S = 3.0, 4.0
        s2 = sigma_L**2 + sigma_S**2
        d = 5
        rng = np.random.Generator(np.random.PCG64(11))
        draws = math.sqrt(s2) * rng.standard_normal((100_000, d))
        for zeta in (2.0, 5.0, 8.0):
            report = norm_bound_probability(d, zeta, sigma_L, sigma_S, 0.05)
            empirical = float(np.mean(np.sum(draws**2, axis=1) <= zeta * s2))
            assert abs(empirical - report.probability) < 0.01

    def test_exceedance_matches_cdf_across_dims(self):
        # binomial 3-sigma agreement at 1e5 samples
        n = 100_000
        for d in (1, 2, 5, 10):
            rng = np.random.Generator(np.random.PCG64(100 + d))
            draws = rng.standard_normal((n, d))
            norms2 = np.sum(draws**2, axis=1)
            for zeta in (0.5 * d, d, 2.0 * d):
                p = chi_square_cdf(d, zeta)
                emp = float(np.mean(norms2 <= zeta))
                assert abs(emp - p) <= 3 * math.sqrt(p * (1 - p) / n) + 1e-9
