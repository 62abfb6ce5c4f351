"""Date-indexed time-series primitives: returns, splits, rolling windows.

Dates are opaque ordered labels (``datetime.date``); there is no calendar
logic here because input files are already trading-day sampled.  All values
are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import InvalidInputError, SplitError

__all__ = [
    "PriceSeries",
    "ReturnSeries",
    "SplitSpec",
    "WindowSpec",
    "simple_returns",
    "split",
    "rolling_windows",
    "consecutive_dates",
]


def _as_readonly(values: Sequence[float]) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise InvalidInputError("values must be one-dimensional")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


def _check_dates(dates: tuple[date, ...]) -> None:
    for prev, nxt in zip(dates, dates[1:]):
        if nxt <= prev:
            raise InvalidInputError(f"dates must be strictly increasing, got {prev} before {nxt}")


@dataclass(frozen=True)
class PriceSeries:
    """Closing prices for one asset, indexed by strictly increasing dates."""

    asset_id: str
    dates: tuple[date, ...]
    prices: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "prices", _as_readonly(self.prices))
        if len(self.dates) != len(self.prices):
            raise InvalidInputError("dates and prices must have equal length")
        if len(self.prices) < 2:
            raise InvalidInputError("a price series needs at least 2 observations")
        _check_dates(self.dates)
        if not np.all(np.isfinite(self.prices)) or np.any(self.prices <= 0.0):
            raise InvalidInputError("prices must be finite and strictly positive")

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class ReturnSeries:
    """Simple (not log) daily returns for one asset."""

    asset_id: str
    dates: tuple[date, ...]
    returns: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "returns", _as_readonly(self.returns))
        if len(self.dates) != len(self.returns):
            raise InvalidInputError("dates and returns must have equal length")
        if len(self.returns) == 0:
            raise InvalidInputError("a return series may not be empty")
        _check_dates(self.dates)
        # Price-derived and file-loaded returns additionally satisfy r > -1;
        # that bound is enforced at the ingestion boundary so synthetic
        # series on other scales (e.g. percent returns) remain usable.
        if not np.all(np.isfinite(self.returns)):
            raise InvalidInputError("returns must be finite")

    def __len__(self) -> int:
        return len(self.dates)

    def slice(self, start: int, stop: int) -> "ReturnSeries":
        """Contiguous sub-series by integer position (start inclusive, stop exclusive)."""
        if not (0 <= start < stop <= len(self)):
            raise InvalidInputError(f"slice [{start}, {stop}) out of range for length {len(self)}")
        return ReturnSeries(self.asset_id, self.dates[start:stop], self.returns[start:stop])


@dataclass(frozen=True)
class SplitSpec:
    """Inclusive segment end dates for a train/validation/test partition."""

    train_end: date
    test_end: date
    validation_end: Optional[date] = None

    def __post_init__(self):
        mid = self.validation_end if self.validation_end is not None else self.train_end
        if not (self.train_end <= mid < self.test_end):
            raise InvalidInputError("need train_end <= validation_end < test_end")
        if self.validation_end is not None and self.validation_end <= self.train_end:
            raise InvalidInputError("validation_end must fall after train_end")


@dataclass(frozen=True)
class WindowSpec:
    """Rolling window of ``length`` observations, advancing ``step`` days per refresh."""

    length: int
    step: int = 1

    def __post_init__(self):
        if self.length < 2:
            raise InvalidInputError("window length must be at least 2")
        if self.step < 1:
            raise InvalidInputError("window step must be positive")


def simple_returns(prices: PriceSeries) -> ReturnSeries:
    """Daily simple returns (p[t+1] - p[t]) / p[t], dated at the later day of each pair."""
    p = prices.prices
    rets = (p[1:] - p[:-1]) / p[:-1]
    return ReturnSeries(prices.asset_id, prices.dates[1:], rets)


def split(
    series: ReturnSeries, spec: SplitSpec
) -> tuple[ReturnSeries, Optional[ReturnSeries], ReturnSeries]:
    """Partition a series into contiguous train / optional validation / test segments.

    Segment membership is by date: train covers dates <= ``train_end``,
    validation (if requested) covers (``train_end``, ``validation_end``],
    test covers the remainder up to and including ``test_end``.  Observations
    after ``test_end`` are outside the covered range and excluded.
    """
    dates = series.dates
    n = len(dates)
    i_train = sum(1 for d in dates if d <= spec.train_end)
    mid_end = spec.validation_end if spec.validation_end is not None else spec.train_end
    i_mid = sum(1 for d in dates if d <= mid_end)
    i_test = sum(1 for d in dates if d <= spec.test_end)

    if i_train == 0:
        raise SplitError("train segment is empty: train_end precedes the first date")
    if spec.validation_end is not None and i_mid == i_train:
        raise SplitError("validation segment is empty")
    if i_test == i_mid:
        raise SplitError("test segment is empty: test_end does not extend past prior segments")
    if i_train > n or i_test > n:  # pragma: no cover - guarded by date comparisons
        raise SplitError("split dates fall outside the series range")

    train = series.slice(0, i_train)
    validation = series.slice(i_train, i_mid) if spec.validation_end is not None else None
    test = series.slice(i_mid, i_test)
    return train, validation, test


def rolling_windows(
    series: ReturnSeries, spec: WindowSpec, forecast_origin_start: date
) -> Iterator[tuple[ReturnSeries, tuple[date, ...]]]:
    """Yield (window, target_dates) pairs covering the span from the origin onward.

    Each window holds the ``spec.length`` most recent observations strictly
    before its target block; successive origins advance by ``spec.step`` days
    and each block targets the next ``spec.step`` dates (the final block is
    truncated at the series end so blocks tile the span exactly).
    """
    dates = series.dates
    n = len(dates)
    i0 = next((i for i, d in enumerate(dates) if d >= forecast_origin_start), n)
    if i0 >= n:
        raise InvalidInputError("forecast origin lies beyond the end of the series")
    if i0 < spec.length:
        raise InvalidInputError(
            f"need {spec.length} observations before the forecast origin, have {i0}"
        )
    for start in range(i0, n, spec.step):
        stop = min(start + spec.step, n)
        window = series.slice(start - spec.length, start)
        yield window, dates[start:stop]


def consecutive_dates(start: date, n: int) -> tuple[date, ...]:
    """n consecutive calendar dates from ``start`` (test/synthetic data helper)."""
    return tuple(start + timedelta(days=i) for i in range(n))
