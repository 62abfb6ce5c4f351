"""Forecasting backends behind the checkpoint identifier.

A backend maps a window of past returns to per-day quantile forecasts for
the next ``horizon`` days.  Identifiers use a scheme prefix:

* ``builtin:empirical-deciles`` - the window's own sample deciles, repeated
  across the horizon.  Dependency-free; used for tests and as a floor model.
* ``timesfm:<checkpoint>``      - the upstream pretrained forecaster, loaded
  lazily from the optional ``timesfm`` package.
"""

from __future__ import annotations

import numpy as np

from .config import AdapterError

__all__ = ["DECILE_LEVELS", "load_backend"]

#: Quantile levels a zero-shot export emits, exactly as the upstream model
#: produces them (no tail extrapolation below the 10% level).
DECILE_LEVELS = tuple(round(0.1 * k, 1) for k in range(1, 10))


class EmpiricalDecileBackend:
    """Sample deciles of the input window, constant across the horizon."""

    def predict_quantiles(self, window: np.ndarray, horizon: int) -> np.ndarray:
        deciles = np.quantile(window, DECILE_LEVELS)
        return np.tile(deciles, (horizon, 1))


class TimesFMBackend:
    """Upstream pretrained forecaster; requires the optional `timesfm` package."""

    def __init__(self, checkpoint: str, window: int, horizon: int):
        try:
            import timesfm  # type: ignore[import-not-found]
        except ImportError as exc:
            raise AdapterError(
                f"checkpoint {checkpoint!r} needs the optional 'timesfm' package; "
                "install it (and its accelerator dependencies) to run zero-shot exports"
            ) from exc
        try:
            self._model = timesfm.TimesFm(
                hparams=timesfm.TimesFmHparams(
                    context_len=window,
                    horizon_len=horizon,
                    quantiles=list(DECILE_LEVELS),
                ),
                checkpoint=timesfm.TimesFmCheckpoint(huggingface_repo_id=checkpoint),
            )
        except Exception as exc:  # upstream raises assorted loader errors
            raise AdapterError(f"could not load checkpoint {checkpoint!r}: {exc}") from exc
        self._horizon = horizon

    def predict_quantiles(self, window: np.ndarray, horizon: int) -> np.ndarray:
        _, quantiles = self._model.forecast([np.asarray(window, dtype=float)], freq=[0])
        # quantile output shape: (series, horizon, 1 + len(quantiles)); the
        # leading slot is the mean forecast
        return np.asarray(quantiles)[0, :horizon, 1 : 1 + len(DECILE_LEVELS)]


def load_backend(checkpoint: str, window: int, horizon: int):
    if checkpoint == "builtin:empirical-deciles":
        return EmpiricalDecileBackend()
    if checkpoint.startswith("timesfm:"):
        return TimesFMBackend(checkpoint.split(":", 1)[1], window, horizon)
    raise AdapterError(
        f"unknown checkpoint scheme in {checkpoint!r}; "
        "expected 'builtin:empirical-deciles' or 'timesfm:<repo-or-path>'"
    )
