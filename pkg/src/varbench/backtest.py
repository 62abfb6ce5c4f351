"""VaR backtesting statistics and cross-sectional comparison machinery.

Coverage tests (unconditional, conditional, dynamic-quantile), the quantile
scoring rule, forecast-comparison tests, and the cross-asset aggregation used
by the report tables.  All likelihood arithmetic runs in log space with the
0 * log 0 = 0 convention so zero- and full-violation samples stay exact.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.special import xlogy
from scipy.stats import norm, t as student_t

from .dist import chi2_survival, validate_level
from .errors import AlignmentError, InvalidInputError
from .forecast import ForecastSeries
from .series import ReturnSeries

__all__ = [
    "SIGNIFICANCE_LEVELS",
    "HitSeries",
    "TestResult",
    "QuantileScores",
    "ComparisonResult",
    "BacktestReport",
    "SummaryStats",
    "compute_hits",
    "ae_ratio",
    "uc_test",
    "cc_test",
    "dq_test",
    "quantile_scores",
    "dm_test",
    "ae_dev_ttest",
    "skill_matrix",
    "cross_section_summary",
    "evaluate_forecasts",
]

#: Test sizes at which reject/fail-to-reject decisions are reported.
SIGNIFICANCE_LEVELS = (0.01, 0.025, 0.05)


@dataclass(frozen=True)
class HitSeries:
    """Binary violation indicators: hits[t] = 1 iff the return fell below the VaR."""

    level: float
    hits: np.ndarray = field(repr=False)

    def __post_init__(self):
        validate_level(self.level)
        arr = np.asarray(self.hits).astype(np.int8)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidInputError("hit sequence must be a nonempty vector")
        if not np.all((arr == 0) | (arr == 1)):
            raise InvalidInputError("hits must be 0/1 valued")
        arr.flags.writeable = False
        object.__setattr__(self, "hits", arr)

    @property
    def total(self) -> int:
        """Number of observations T."""
        return int(self.hits.size)

    @property
    def violations(self) -> int:
        """Number of violations A."""
        return int(self.hits.sum())


@dataclass(frozen=True)
class TestResult:
    """A chi-squared test outcome with reject decisions at the reporting sizes."""

    statistic: float
    dof: int
    p_value: float
    decision_at: Mapping[float, bool]
    degenerate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "decision_at", dict(self.decision_at))
        if not math.isnan(self.p_value):
            for sig, reject in self.decision_at.items():
                if reject != (self.p_value < sig):
                    raise InvalidInputError("decisions inconsistent with the p-value")


def _chi2_result(statistic: float, dof: int, degenerate: bool = False) -> TestResult:
    p = chi2_survival(statistic, dof)
    return TestResult(
        statistic=float(statistic),
        dof=dof,
        p_value=p,
        decision_at={sig: p < sig for sig in SIGNIFICANCE_LEVELS},
        degenerate=degenerate,
    )


def _degenerate_result(dof: int) -> TestResult:
    return TestResult(
        statistic=math.nan, dof=dof, p_value=math.nan, decision_at={}, degenerate=True
    )


def compute_hits(returns: ReturnSeries, forecasts: ForecastSeries) -> HitSeries:
    """Violation indicators with the strict convention: a tie is not a hit."""
    if returns.dates != forecasts.dates:
        raise AlignmentError(
            f"return and forecast dates differ for {forecasts.asset_id}/{forecasts.model_id}"
        )
    return HitSeries(level=forecasts.level, hits=returns.returns < forecasts.values)


def ae_ratio(hits: HitSeries) -> float:
    """Actual over expected violations, A / (T * alpha); 1 means calibrated."""
    return hits.violations / (hits.total * hits.level)


def uc_test(hits: HitSeries) -> TestResult:
    """Unconditional-coverage likelihood ratio of the violation count."""
    T, A = hits.total, hits.violations
    alpha = hits.level
    observed = xlogy(T - A, 1.0 - A / T) + xlogy(A, A / T)
    under_null = xlogy(T - A, 1.0 - alpha) + xlogy(A, alpha)
    statistic = max(2.0 * (observed - under_null), 0.0)
    return _chi2_result(statistic, dof=1)


def cc_test(hits: HitSeries) -> TestResult:
    """Conditional coverage: the coverage ratio plus a first-order independence ratio.

    The statistic is the unconditional-coverage component plus the likelihood
    ratio of the one-step transition counts n_ij against an iid hit process,
    so it never falls below `uc_test` on the same hits.  (Adding the
    full-sample coverage term to the Markov-vs-null ratio directly would
    double-count one observation and over-reject at conventional sizes.)
    With no violations the independence component is identically zero and the
    result is flagged degenerate.
    """
    T, A = hits.total, hits.violations
    if T < 2:
        raise InvalidInputError("conditional coverage needs at least 2 observations")
    h = hits.hits
    prev, cur = h[:-1], h[1:]
    n00 = int(np.sum((prev == 0) & (cur == 0)))
    n01 = int(np.sum((prev == 0) & (cur == 1)))
    n10 = int(np.sum((prev == 1) & (cur == 0)))
    n11 = int(np.sum((prev == 1) & (cur == 1)))
    pi01 = n01 / (n00 + n01) if n00 + n01 else 0.0
    pi11 = n11 / (n10 + n11) if n10 + n11 else 0.0
    markov = (
        xlogy(n00, 1.0 - pi01) + xlogy(n01, pi01) + xlogy(n10, 1.0 - pi11) + xlogy(n11, pi11)
    )
    ones = n01 + n11
    pi = ones / (T - 1)
    iid = xlogy(T - 1 - ones, 1.0 - pi) + xlogy(ones, pi)
    independence = max(2.0 * (markov - iid), 0.0)
    statistic = uc_test(hits).statistic + independence
    return _chi2_result(statistic, dof=2, degenerate=(A == 0))


def dq_test(hits: HitSeries, forecasts: ForecastSeries, lags: int = 4) -> TestResult:
    """Dynamic-quantile regression test for residual violation dynamics.

    Regresses the demeaned hit on an intercept, its own first ``lags`` lags,
    and the contemporaneous VaR forecast.  A rank-deficient regressor matrix
    (e.g. constant forecasts and no hits) yields a degenerate result whose
    p-value is unavailable.
    """
    if lags < 1:
        raise InvalidInputError("dynamic-quantile test needs at least one lag")
    T = hits.total
    if T <= lags + 5:
        raise InvalidInputError(f"dynamic-quantile test needs more than {lags + 5} observations")
    if len(forecasts) != T:
        raise AlignmentError("hit sequence and forecasts must have equal length")
    alpha = hits.level
    demeaned = hits.hits.astype(float) - alpha
    q = forecasts.values
    y = demeaned[lags:]
    n = y.size
    X = np.empty((n, lags + 2))
    X[:, 0] = 1.0
    for k in range(1, lags + 1):
        X[:, k] = demeaned[lags - k : T - k]
    X[:, lags + 1] = q[lags:]
    beta, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    dof = lags + 2
    if rank < X.shape[1]:
        return _degenerate_result(dof)
    xtx = X.T @ X
    statistic = float(beta @ xtx @ beta) / (alpha * (1.0 - alpha))
    return _chi2_result(max(statistic, 0.0), dof=dof)


@dataclass(frozen=True)
class QuantileScores:
    """Per-day pinball losses of a forecast series, with their mean and total."""

    per_day: np.ndarray = field(repr=False)
    mean: float
    total: float


def quantile_scores(returns: ReturnSeries, forecasts: ForecastSeries) -> QuantileScores:
    """Pinball loss (alpha - indicator(r < q)) * (r - q); nonnegative, 0 only at r = q."""
    if returns.dates != forecasts.dates:
        raise AlignmentError(
            f"return and forecast dates differ for {forecasts.asset_id}/{forecasts.model_id}"
        )
    r = returns.returns
    q = forecasts.values
    scores = (forecasts.level - (r < q)) * (r - q)
    return QuantileScores(per_day=scores, mean=float(scores.mean()), total=float(scores.sum()))


@dataclass(frozen=True)
class ComparisonResult:
    """One-sided comparison outcome; ``infinite`` marks a zero-variance differential."""

    statistic: float
    p_value: float
    infinite: bool = False

    def rejects_at(self, significance: float) -> bool:
        return not math.isnan(self.p_value) and self.p_value < significance


def dm_test(scores_i: np.ndarray, scores_j: np.ndarray) -> ComparisonResult:
    """Equal-predictive-accuracy test on per-day loss differentials.

    One-step-ahead forecasts carry no moving-average overlap, so the plain
    sample variance is used (no long-run correction).  The one-sided
    alternative is that model i scores worse than model j.
    """
    si = np.asarray(scores_i, dtype=float)
    sj = np.asarray(scores_j, dtype=float)
    if si.shape != sj.shape or si.ndim != 1:
        raise InvalidInputError("score series must be one-dimensional and equally long")
    n = si.size
    if n < 30:
        raise InvalidInputError("comparison needs at least 30 observations")
    d = si - sj
    mean = float(d.mean())
    if np.all(d == d[0]):  # a constant differential has no sampling variance
        if d[0] == 0.0:
            return ComparisonResult(statistic=0.0, p_value=0.5)
        stat = math.inf if d[0] > 0 else -math.inf
        return ComparisonResult(statistic=stat, p_value=0.0 if d[0] > 0 else 1.0, infinite=True)
    statistic = mean / math.sqrt(float(d.var(ddof=1)) / n)
    return ComparisonResult(statistic=statistic, p_value=float(norm.sf(statistic)))


def ae_dev_ttest(
    dev_i: Sequence[float], dev_j: Sequence[float], paired: bool = False
) -> ComparisonResult:
    """Two-sample t-test on per-asset calibration errors |1 - AE|.

    Unequal-variance (Welch) by default; ``paired`` switches to the paired
    t-test on per-asset differences.  One-sided alternative: model i has the
    larger mean error.
    """
    x = np.asarray(dev_i, dtype=float)
    y = np.asarray(dev_j, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise InvalidInputError("deviation vectors must be one-dimensional and equally long")
    n = x.size
    if n < 3:
        raise InvalidInputError("comparison needs at least 3 assets")
    if paired:
        d = x - y
        if np.all(d == d[0]):
            if d[0] == 0.0:
                return ComparisonResult(statistic=0.0, p_value=0.5)
            stat = math.inf if d[0] > 0 else -math.inf
            return ComparisonResult(statistic=stat, p_value=0.0 if d[0] > 0 else 1.0, infinite=True)
        statistic = float(d.mean()) / math.sqrt(float(d.var(ddof=1)) / n)
        dof = n - 1.0
    else:
        if np.all(x == x[0]) and np.all(y == y[0]):  # both samples constant
            diff = float(x[0] - y[0])
            if diff == 0.0:
                return ComparisonResult(statistic=0.0, p_value=0.5)
            stat = math.inf if diff > 0 else -math.inf
            return ComparisonResult(statistic=stat, p_value=0.0 if diff > 0 else 1.0, infinite=True)
        vx = float(x.var(ddof=1))
        vy = float(y.var(ddof=1))
        se2 = vx / n + vy / n
        statistic = float(x.mean() - y.mean()) / math.sqrt(se2)
        dof = se2 * se2 / ((vx / n) ** 2 / (n - 1) + (vy / n) ** 2 / (n - 1))
    return ComparisonResult(statistic=statistic, p_value=float(student_t.sf(statistic, dof)))


def skill_matrix(
    total_losses: Mapping[tuple[str, str], float],
    models: Sequence[str],
    assets: Sequence[str],
) -> np.ndarray:
    """Mean pairwise total-loss ratios: entry (i, j) averages loss_j / loss_i.

    Row i is the benchmark; the diagonal is reported as 0 to match the table
    layout.  Assets where the benchmark's loss is zero are excluded from that
    row's means with a warning.
    """
    for m in models:
        for a in assets:
            if (m, a) not in total_losses:
                raise InvalidInputError(f"missing total loss for model {m!r} on asset {a!r}")
    k = len(models)
    out = np.zeros((k, k))
    for i, bench in enumerate(models):
        usable = [a for a in assets if total_losses[(bench, a)] != 0.0]
        if len(usable) < len(assets):
            warnings.warn(
                f"benchmark {bench!r} has zero total loss on {len(assets) - len(usable)} asset(s); excluded",
                stacklevel=2,
            )
        for j, other in enumerate(models):
            if i == j:
                continue
            if not usable:
                out[i, j] = math.nan
                continue
            ratios = [total_losses[(other, a)] / total_losses[(bench, a)] for a in usable]
            out[i, j] = float(np.mean(ratios))
    return out


@dataclass(frozen=True)
class SummaryStats:
    """Cross-asset distribution of one metric for one model, with rank counts."""

    minimum: float
    mean: float
    median: float
    maximum: float
    sd: float
    best_count: int
    top2_count: int


def cross_section_summary(
    metric: Mapping[tuple[str, str], float],
    models: Sequence[str],
    assets: Sequence[str],
) -> dict[str, SummaryStats]:
    """Per-model summary of a per-asset metric plus best / top-two counts.

    A model is "best" on an asset when it attains the minimum there; ties
    award every tied model.  "Top two" means at most one model is strictly
    better (so tied firsts leave no room for a second place).
    """
    if not assets:
        raise InvalidInputError("need at least one asset")
    for m in models:
        for a in assets:
            if (m, a) not in metric:
                raise InvalidInputError(f"missing metric for model {m!r} on asset {a!r}")
    out = {}
    for m in models:
        values = np.array([metric[(m, a)] for a in assets], dtype=float)
        best = 0
        top2 = 0
        for a in assets:
            mine = metric[(m, a)]
            others = [metric[(o, a)] for o in models]
            strictly_better = sum(1 for v in others if v < mine)
            if strictly_better == 0:
                best += 1
            if strictly_better <= 1:
                top2 += 1
        out[m] = SummaryStats(
            minimum=float(values.min()),
            mean=float(values.mean()),
            median=float(np.median(values)),
            maximum=float(values.max()),
            sd=float(values.std(ddof=1)) if values.size > 1 else math.nan,
            best_count=best,
            top2_count=top2,
        )
    return out


@dataclass(frozen=True)
class BacktestReport:
    """Evaluation bundle for one (asset, model, level) combination."""

    asset_id: str
    model_id: str
    level: float
    n_obs: int
    violations: int
    ae: float
    uc: TestResult
    cc: TestResult
    dq: TestResult
    mean_qs: float
    total_qs: float

    def __post_init__(self):
        if self.ae < 0:
            raise InvalidInputError("the actual/expected ratio cannot be negative")
        if abs(self.mean_qs * self.n_obs - self.total_qs) > 1e-9 * max(abs(self.total_qs), 1.0):
            raise InvalidInputError("mean and total quantile scores are inconsistent")


def evaluate_forecasts(
    returns: ReturnSeries, forecasts: ForecastSeries, dq_lags: int = 4
) -> tuple[BacktestReport, QuantileScores]:
    """All single-series backtests for one forecast series over aligned returns."""
    hits = compute_hits(returns, forecasts)
    scores = quantile_scores(returns, forecasts)
    report = BacktestReport(
        asset_id=forecasts.asset_id,
        model_id=forecasts.model_id,
        level=forecasts.level,
        n_obs=hits.total,
        violations=hits.violations,
        ae=ae_ratio(hits),
        uc=uc_test(hits),
        cc=cc_test(hits),
        dq=dq_test(hits, forecasts, lags=dq_lags),
        mean_qs=scores.mean,
        total_qs=scores.total,
    )
    return report, scores
