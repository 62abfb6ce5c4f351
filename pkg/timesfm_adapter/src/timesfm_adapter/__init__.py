"""Batch exporter that turns a pretrained quantile forecaster into VaR files.

Runs a forecasting backend over rolling windows of daily returns and writes
one ``date,level,var_forecast`` CSV per asset, the interchange format the
benchmark harness consumes.  Zero-shot backends emit the nine decile levels
(0.1 through 0.9) exactly as produced, uncalibrated.
"""

from .config import AdapterConfig, AdapterError, load_config
from .export import export_zero_shot

__version__ = "0.1.0"

__all__ = ["AdapterConfig", "AdapterError", "export_zero_shot", "load_config"]
