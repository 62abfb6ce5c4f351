"""Container for one-day-ahead VaR forecasts from any source."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date

import numpy as np

from .dist import validate_level
from .errors import InvalidInputError

__all__ = ["ForecastSeries"]


@dataclass(frozen=True)
class ForecastSeries:
    """VaR forecasts at one quantile level for one (asset, model) pair."""

    asset_id: str
    model_id: str
    level: float
    dates: tuple[date, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        validate_level(self.level)
        object.__setattr__(self, "dates", tuple(self.dates))
        arr = np.asarray(self.values, dtype=float).copy()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        if len(self.dates) != len(self.values):
            raise InvalidInputError("dates and forecasts must have equal length")
        if len(self.values) == 0:
            raise InvalidInputError("a forecast series may not be empty")
        for prev, nxt in zip(self.dates, self.dates[1:]):
            if nxt <= prev:
                raise InvalidInputError("forecast dates must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise InvalidInputError("forecasts must be finite")

    def __len__(self) -> int:
        return len(self.dates)
