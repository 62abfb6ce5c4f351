"""One-day Value-at-Risk forecasting benchmarks and backtesting battery.

Three model families (rolling historical quantile, GARCH(1,1) with
pluggable innovation distributions, a one-factor score-driven VaR/ES model)
plus the full evaluation toolkit: actual/expected ratios, coverage and
dynamic-quantile tests, quantile scores, pairwise forecast-comparison tests,
and cross-sectional report tables.  External quantile forecasters plug in
through a delimited forecast-file format.
"""

from .backtest import (
    BacktestReport,
    ComparisonResult,
    HitSeries,
    QuantileScores,
    SummaryStats,
    TestResult,
    ae_dev_ttest,
    ae_ratio,
    cc_test,
    compute_hits,
    cross_section_summary,
    dm_test,
    dq_test,
    evaluate_forecasts,
    quantile_scores,
    skill_matrix,
    uc_test,
)
from .dist import (
    CANONICAL_LEVELS,
    Empirical,
    HansenSkewT,
    Normal,
    StudentT,
    chi2_survival,
    empirical_quantile,
)
from .forecast import ForecastSeries
from .models import (
    GarchParams,
    GasParams,
    fit_garch,
    fit_gas,
    garch_filter,
    garch_var_forecast,
    gas_filter,
    historical_var,
    simulate_garch,
)
from .series import (
    PriceSeries,
    ReturnSeries,
    SplitSpec,
    WindowSpec,
    rolling_windows,
    simple_returns,
    split,
)

__version__ = "0.1.0"

__all__ = [
    "BacktestReport",
    "CANONICAL_LEVELS",
    "ComparisonResult",
    "Empirical",
    "ForecastSeries",
    "GarchParams",
    "GasParams",
    "HansenSkewT",
    "HitSeries",
    "Normal",
    "PriceSeries",
    "QuantileScores",
    "ReturnSeries",
    "SplitSpec",
    "StudentT",
    "SummaryStats",
    "TestResult",
    "WindowSpec",
    "ae_dev_ttest",
    "ae_ratio",
    "cc_test",
    "chi2_survival",
    "compute_hits",
    "cross_section_summary",
    "dm_test",
    "dq_test",
    "empirical_quantile",
    "evaluate_forecasts",
    "fit_garch",
    "fit_gas",
    "garch_filter",
    "garch_var_forecast",
    "gas_filter",
    "historical_var",
    "quantile_scores",
    "rolling_windows",
    "simple_returns",
    "simulate_garch",
    "skill_matrix",
    "split",
    "uc_test",
]
