"""Distributions, quantiles, and special functions against independent oracles."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from varbench.dist import (
    Empirical,
    HansenSkewT,
    Normal,
    StudentT,
    chi2_survival,
    empirical_quantile,
)
from varbench.errors import InvalidInputError, UnsupportedOperationError

PARAMETRIC = [Normal(), StudentT(5.0), StudentT(12.0), HansenSkewT(6.0, -0.4), HansenSkewT(8.0, 0.3)]


def normal_quantile_oracle(alpha: float) -> float:
    """Bisection on the error-function CDF, independent of scipy."""

    def cdf(x):
        return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))

    lo, hi = -40.0, 40.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cdf(mid) < alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def integrate_density(dist, weight=lambda x: 1.0) -> float:
    """Piecewise quadrature of weight(x) * pdf(x) over the whole real line."""
    total = 0.0
    for a, b in [(-math.inf, -30.0), (-30.0, 30.0), (30.0, math.inf)]:
        piece, _ = quad(
            lambda x: weight(x) * math.exp(dist.log_density(x)), a, b, limit=400
        )
        total += piece
    return total


def sort_quantile_oracle(samples, alpha: float) -> float:
    """Pure-python full-sort order-statistic quantile with linear interpolation."""
    s = sorted(float(x) for x in samples)
    n = len(s)
    h = (n - 1) * alpha
    i = int(math.floor(h))
    if i + 1 >= n:
        return s[-1]
    return s[i] + (h - i) * (s[i + 1] - s[i])


class TestQuantile:
    def test_normal_median(self):
        assert Normal().quantile(0.5) == pytest.approx(0.0, abs=1e-12)

    def test_normal_tail_vs_erf_bisection(self):
        for alpha in (0.01, 0.025, 0.05, 0.1, 0.9):
            assert Normal().quantile(alpha) == pytest.approx(
                normal_quantile_oracle(alpha), abs=1e-9
            )
        assert Normal().quantile(0.05) == pytest.approx(-1.6448536269514722, abs=1e-9)

    def test_skewt_reduces_to_student_t(self):
        skew = HansenSkewT(8.0, 0.0)
        t = StudentT(8.0)
        for alpha in np.linspace(0.01, 0.99, 21):
            assert skew.quantile(alpha) == pytest.approx(t.quantile(alpha), abs=1e-10)
        for x in np.linspace(-10, 10, 41):
            assert skew.log_density(x) == pytest.approx(t.log_density(x), abs=1e-10)

    def test_cdf_inverts_quantile(self):
        grid = np.linspace(0.01, 0.99, 99)
        for dist in PARAMETRIC:
            for alpha in grid:
                assert dist.cdf(dist.quantile(alpha)) == pytest.approx(alpha, abs=1e-8)

    def test_invalid_dof(self):
        with pytest.raises(InvalidInputError):
            StudentT(2.0)
        with pytest.raises(InvalidInputError):
            HansenSkewT(1.5, 0.0)
        with pytest.raises(InvalidInputError):
            HansenSkewT(5.0, 1.0)

    def test_invalid_level(self):
        with pytest.raises(InvalidInputError):
            Normal().quantile(0.0)
        with pytest.raises(InvalidInputError):
            Normal().quantile(1.0)


class TestLogDensity:
    def test_normal_at_zero(self):
        assert Normal().log_density(0.0) == pytest.approx(-0.9189385332046727, abs=1e-12)

    def test_student_t_large_dof_near_normal(self):
        assert abs(StudentT(1e6).log_density(1.0) - Normal().log_density(1.0)) < 1e-3

    def test_densities_integrate_to_one(self):
        for dist in [Normal(), StudentT(5.0), HansenSkewT(5.0, 0.3), HansenSkewT(7.0, -0.6)]:
            assert integrate_density(dist) == pytest.approx(1.0, abs=1e-8)

    def test_standardized_to_unit_variance(self):
        for dist in [StudentT(5.0), HansenSkewT(5.0, 0.3), HansenSkewT(9.0, -0.5)]:
            mean = integrate_density(dist, weight=lambda x: x)
            var = integrate_density(dist, weight=lambda x: x * x)
            assert mean == pytest.approx(0.0, abs=1e-6)
            assert var == pytest.approx(1.0, abs=1e-6)

    def test_empirical_has_no_density(self):
        emp = Empirical(np.arange(10.0))
        with pytest.raises(UnsupportedOperationError):
            emp.log_density(0.0)


class TestEmpiricalQuantile:
    def test_median(self):
        assert empirical_quantile([1, 2, 3, 4, 5], 0.5) == pytest.approx(3.0)

    def test_singleton(self):
        for alpha in (0.01, 0.5, 0.99):
            assert empirical_quantile([10.0], alpha) == 10.0

    def test_matches_sort_oracle_exactly(self, rng):
        samples = rng.uniform(size=1000)
        assert empirical_quantile(samples, 0.05) == sort_quantile_oracle(samples, 0.05)

    def test_random_fixtures_match_oracle_exactly(self, rng):
        for _ in range(300):
            n = int(rng.integers(1, 200))
            samples = rng.normal(0, 1, n)
            alpha = float(rng.uniform(0.001, 0.999))
            assert empirical_quantile(samples, alpha) == sort_quantile_oracle(samples, alpha)

    def test_monotone_in_alpha(self, rng):
        samples = rng.normal(0, 1, 87)
        values = [empirical_quantile(samples, a) for a in np.linspace(0.01, 0.99, 60)]
        assert all(a <= b for a, b in zip(values, values[1:]))

    def test_empty_rejected(self):
        with pytest.raises(InvalidInputError):
            empirical_quantile([], 0.5)


class TestChi2Survival:
    def test_dof2_closed_form_value(self):
        assert chi2_survival(5.991, 2) == pytest.approx(0.0500, abs=1e-4)

    def test_dof1_vs_erfc_oracle(self):
        # P(chi2_1 > x) = erfc(sqrt(x / 2))
        for x in (3.841, 1.0, 6.635):
            assert chi2_survival(x, 1) == pytest.approx(math.erfc(math.sqrt(x / 2.0)), abs=1e-10)
        assert chi2_survival(3.841, 1) == pytest.approx(0.0500, abs=1e-4)

    def test_zero_statistic(self):
        for k in (1, 2, 5, 10):
            assert chi2_survival(0.0, k) == 1.0

    def test_dof2_closed_form_random(self, rng):
        for x in rng.uniform(0, 30, 200):
            assert chi2_survival(float(x), 2) == pytest.approx(math.exp(-x / 2.0), abs=1e-12)

    def test_strictly_decreasing(self, rng):
        for k in (1, 2, 4, 9):
            xs = np.sort(rng.uniform(0, 25, 50))
            values = [chi2_survival(float(x), k) for x in xs]
            assert all(a > b for a, b in zip(values, values[1:]))

    def test_negative_rejected(self):
        with pytest.raises(InvalidInputError):
            chi2_survival(-0.1, 2)


class TestSampling:
    def test_normal_moments(self):
        draws = Normal().sample(10**6, seed=11)
        assert abs(draws.mean()) < 0.005
        assert abs(draws.var() - 1.0) < 0.01

    def test_determinism(self):
        for dist in PARAMETRIC:
            a = dist.sample(500, seed=3)
            b = dist.sample(500, seed=3)
            np.testing.assert_array_equal(a, b)

    def test_skewt_negative_skewness(self):
        dist = HansenSkewT(6.0, -0.5)
        third_moment = integrate_density(dist, weight=lambda x: x**3)
        assert third_moment < 0
        draws = dist.sample(10**6, seed=5)
        sample_skew = np.mean(((draws - draws.mean()) / draws.std()) ** 3)
        assert sample_skew < 0
        assert np.sign(sample_skew) == np.sign(third_moment)

    def test_student_t_moments(self):
        draws = StudentT(6.0).sample(10**6, seed=9)
        assert abs(draws.mean()) < 0.005
        assert abs(draws.var() - 1.0) < 0.02

    def test_empirical_sampler_unsupported(self):
        with pytest.raises(UnsupportedOperationError):
            Empirical(np.arange(10.0)).sample(5, seed=1)


class TestEmpiricalVariant:
    def test_quantile_delegates(self, rng):
        samples = rng.normal(0, 1, 300)
        emp = Empirical(samples)
        assert emp.quantile(0.05) == empirical_quantile(samples, 0.05)

    def test_min_sample_size(self):
        with pytest.raises(InvalidInputError):
            Empirical(np.arange(5.0))
