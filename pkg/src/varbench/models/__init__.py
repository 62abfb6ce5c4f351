"""Forecasting model families producing one-day-ahead VaR."""

from .garch import GarchParams, fit_garch, garch_filter, garch_var_forecast, simulate_garch
from .gas import GasParams, fit_gas, fz0_loss, gas_filter
from .historical import historical_var

__all__ = [
    "GarchParams",
    "fit_garch",
    "garch_filter",
    "garch_var_forecast",
    "simulate_garch",
    "GasParams",
    "fit_gas",
    "fz0_loss",
    "gas_filter",
    "historical_var",
]
