"""Standardized innovation distributions and the special functions the tests need.

Four variants are supported: standard normal, variance-standardized Student-t,
Hansen's standardized skew-t, and the empirical distribution of a stored
sample.  The parametric variants all have mean 0 and variance 1 so that a
volatility state keeps its variance interpretation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats

from .errors import InvalidInputError, UnsupportedOperationError

__all__ = [
    "CANONICAL_LEVELS",
    "validate_level",
    "Normal",
    "StudentT",
    "HansenSkewT",
    "Empirical",
    "Distribution",
    "empirical_quantile",
    "chi2_survival",
]

#: VaR levels used throughout the evaluation battery.
CANONICAL_LEVELS = (0.01, 0.025, 0.05, 0.1)


def validate_level(alpha: float) -> float:
    """Check that a quantile level lies strictly inside (0, 1)."""
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError(f"quantile level must lie in (0, 1), got {alpha}")
    return alpha


def empirical_quantile(samples, alpha: float) -> float:
    """Order-statistic quantile with linear interpolation.

    For n sorted samples the quantile sits at position h = (n - 1) * alpha:
    ``s[floor(h)] + (h - floor(h)) * (s[floor(h) + 1] - s[floor(h)])``.
    """
    alpha = validate_level(alpha)
    s = np.sort(np.asarray(samples, dtype=float))
    n = s.size
    if n == 0:
        raise InvalidInputError("cannot take the quantile of an empty sample")
    h = (n - 1) * alpha
    i = int(math.floor(h))
    if i + 1 >= n:
        return float(s[-1])
    return float(s[i] + (h - i) * (s[i + 1] - s[i]))


def chi2_survival(x: float, k: int) -> float:
    """P(chi-squared with k dof > x) via the regularized upper incomplete gamma."""
    if x < 0:
        raise InvalidInputError(f"chi-squared statistic must be nonnegative, got {x}")
    if k < 1:
        raise InvalidInputError(f"degrees of freedom must be positive, got {k}")
    return float(special.gammaincc(k / 2.0, x / 2.0))


class Distribution:
    """Interface shared by the standardized innovation distributions."""

    def quantile(self, alpha: float) -> float:
        raise NotImplementedError

    def log_density(self, x):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def sample(self, n: int, seed: int) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class Normal(Distribution):
    """Standard normal innovations."""

    def quantile(self, alpha: float) -> float:
        return float(stats.norm.ppf(validate_level(alpha)))

    def log_density(self, x):
        x = np.asarray(x, dtype=float)
        out = -0.5 * math.log(2.0 * math.pi) - 0.5 * x * x
        return float(out) if out.ndim == 0 else out

    def cdf(self, x):
        out = stats.norm.cdf(x)
        return float(out) if np.ndim(x) == 0 else out

    def sample(self, n: int, seed: int) -> np.ndarray:
        return np.random.default_rng(seed).standard_normal(n)


def _check_nu(nu: float) -> None:
    if not nu > 2.0:
        raise InvalidInputError(f"degrees of freedom must exceed 2, got {nu}")


@dataclass(frozen=True)
class StudentT(Distribution):
    """Student-t innovations rescaled to unit variance (scale sqrt((nu-2)/nu))."""

    nu: float

    def __post_init__(self):
        _check_nu(self.nu)

    @property
    def _scale(self) -> float:
        return math.sqrt((self.nu - 2.0) / self.nu)

    def quantile(self, alpha: float) -> float:
        return float(self._scale * stats.t.ppf(validate_level(alpha), self.nu))

    def log_density(self, x):
        x = np.asarray(x, dtype=float)
        nu = self.nu
        norm_const = (
            special.gammaln((nu + 1.0) / 2.0)
            - special.gammaln(nu / 2.0)
            - 0.5 * math.log(math.pi * (nu - 2.0))
        )
        out = norm_const - 0.5 * (nu + 1.0) * np.log1p(x * x / (nu - 2.0))
        return float(out) if out.ndim == 0 else out

    def cdf(self, x):
        out = stats.t.cdf(np.asarray(x, dtype=float) / self._scale, self.nu)
        return float(out) if np.ndim(x) == 0 else out

    def sample(self, n: int, seed: int) -> np.ndarray:
        return np.random.default_rng(seed).standard_t(self.nu, n) * self._scale


@dataclass(frozen=True)
class HansenSkewT(Distribution):
    """Hansen (1994) standardized skew-t with tail parameter nu and skew lam.

    Reduces to the variance-standardized Student-t at lam = 0; lam < 0 skews
    the left tail heavier.
    """

    nu: float
    lam: float

    def __post_init__(self):
        _check_nu(self.nu)
        if not -1.0 < self.lam < 1.0:
            raise InvalidInputError(f"skew parameter must lie in (-1, 1), got {self.lam}")

    @property
    def _constants(self) -> tuple[float, float, float]:
        nu, lam = self.nu, self.lam
        log_c = (
            special.gammaln((nu + 1.0) / 2.0)
            - special.gammaln(nu / 2.0)
            - 0.5 * math.log(math.pi * (nu - 2.0))
        )
        c = math.exp(log_c)
        a = 4.0 * lam * c * (nu - 2.0) / (nu - 1.0)
        b = math.sqrt(1.0 + 3.0 * lam * lam - a * a)
        return a, b, c

    def quantile(self, alpha: float) -> float:
        alpha = validate_level(alpha)
        nu, lam = self.nu, self.lam
        a, b, _ = self._constants
        inv_scale = math.sqrt((nu - 2.0) / nu)
        if alpha < (1.0 - lam) / 2.0:
            core = (1.0 - lam) * stats.t.ppf(alpha / (1.0 - lam), nu)
        else:
            core = (1.0 + lam) * stats.t.ppf((alpha + lam) / (1.0 + lam), nu)
        return float((core * inv_scale - a) / b)

    def log_density(self, x):
        x = np.asarray(x, dtype=float)
        nu, lam = self.nu, self.lam
        a, b, c = self._constants
        denom = np.where(x < -a / b, 1.0 - lam, 1.0 + lam)
        y = (b * x + a) / denom
        out = math.log(b) + math.log(c) - 0.5 * (nu + 1.0) * np.log1p(y * y / (nu - 2.0))
        return float(out) if out.ndim == 0 else out

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        nu, lam = self.nu, self.lam
        a, b, _ = self._constants
        s = math.sqrt(nu / (nu - 2.0))
        left = (1.0 - lam) * stats.t.cdf(s * (b * x + a) / (1.0 - lam), nu)
        right = (1.0 + lam) * stats.t.cdf(s * (b * x + a) / (1.0 + lam), nu) - lam
        out = np.where(x < -a / b, left, right)
        return float(out) if out.ndim == 0 else out

    def sample(self, n: int, seed: int) -> np.ndarray:
        u = np.random.default_rng(seed).uniform(size=n)
        nu, lam = self.nu, self.lam
        a, b, _ = self._constants
        inv_scale = math.sqrt((nu - 2.0) / nu)
        lo = (1.0 - lam) * stats.t.ppf(u / (1.0 - lam), nu)
        hi = (1.0 + lam) * stats.t.ppf((u + lam) / (1.0 + lam), nu)
        core = np.where(u < (1.0 - lam) / 2.0, lo, hi)
        return (core * inv_scale - a) / b


@dataclass(frozen=True)
class Empirical(Distribution):
    """Empirical distribution of a stored sample; quantiles only."""

    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float).copy()
        if arr.ndim != 1 or arr.size < 10:
            raise InvalidInputError("empirical distribution needs at least 10 samples")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("empirical samples must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)

    def quantile(self, alpha: float) -> float:
        return empirical_quantile(self.samples, alpha)

    def log_density(self, x):
        raise UnsupportedOperationError("empirical distribution has no density")

    def cdf(self, x):
        raise UnsupportedOperationError("empirical distribution has no parametric cdf")

    def sample(self, n: int, seed: int) -> np.ndarray:
        raise UnsupportedOperationError("empirical distribution has no sampler")
