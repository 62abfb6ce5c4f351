"""Rolling-window historical VaR: the sample quantile of recent returns."""

from __future__ import annotations

from ..dist import empirical_quantile
from ..series import ReturnSeries

__all__ = ["historical_var"]


def historical_var(window: ReturnSeries, alpha: float) -> float:
    """Empirical alpha-quantile of the window's returns."""
    return empirical_quantile(window.returns, alpha)
