"""Delimited-text input and output.

All files are UTF-8 CSV with a header row, ISO-8601 dates, a decimal point
and no thousands separators.  Three schemas exist:

* price input:     ``date,price`` (one file per asset)
* return input:    ``date,return`` (alternative to prices)
* forecast files:  ``date,level,var_forecast`` (one file per asset and model)

Forecast files are both the external-model interchange format and the
serialization the run bundle uses for its own forecasts, so a bundle can be
re-scored without refitting anything.
"""

from __future__ import annotations

import csv
from datetime import date
from pathlib import Path
from typing import Union

import numpy as np

from .errors import SchemaError
from .forecast import ForecastSeries
from .series import PriceSeries, ReturnSeries

__all__ = [
    "load_price_csv",
    "load_return_csv",
    "load_series_csv",
    "load_external_forecasts",
    "write_return_csv",
    "write_forecast_csv",
]

PRICE_HEADER = ["date", "price"]
RETURN_HEADER = ["date", "return"]
FORECAST_HEADER = ["date", "level", "var_forecast"]


def _read_rows(path: Union[str, Path]) -> tuple[list[str], list[list[str]]]:
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [row for row in csv.reader(fh) if row]
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read file ({exc})") from exc
    if not rows:
        raise SchemaError(f"{path}: file is empty")
    header = [cell.strip() for cell in rows[0]]
    if len(rows) == 1:
        raise SchemaError(f"{path}: no data rows")
    return header, rows[1:]


def _parse_date(path: Path, text: str, line: int) -> date:
    try:
        return date.fromisoformat(text.strip())
    except ValueError as exc:
        raise SchemaError(f"{path}, line {line}: invalid ISO date {text!r}") from exc


def _parse_float(path: Path, text: str, line: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise SchemaError(f"{path}, line {line}: non-numeric {column} {text!r}") from exc
    if not np.isfinite(value):
        raise SchemaError(f"{path}, line {line}: non-finite {column} {text!r}")
    return value


def load_price_csv(path: Union[str, Path], asset_id: str) -> PriceSeries:
    """Read a ``date,price`` file; prices must be positive and dates increasing."""
    path = Path(path)
    header, rows = _read_rows(path)
    if header != PRICE_HEADER:
        raise SchemaError(f"{path}: expected header {','.join(PRICE_HEADER)!r}, got {','.join(header)!r}")
    dates, prices = [], []
    for i, row in enumerate(rows, start=2):
        if len(row) != 2:
            raise SchemaError(f"{path}, line {i}: expected 2 columns, got {len(row)}")
        dates.append(_parse_date(path, row[0], i))
        value = _parse_float(path, row[1], i, "price")
        if value <= 0:
            raise SchemaError(f"{path}, line {i}: price must be positive, got {value}")
        prices.append(value)
    try:
        return PriceSeries(asset_id, tuple(dates), np.array(prices))
    except ValueError as exc:
        raise SchemaError(f"{path}: {exc}") from exc


def load_return_csv(path: Union[str, Path], asset_id: str) -> ReturnSeries:
    """Read a ``date,return`` file; simple returns must exceed -1."""
    path = Path(path)
    header, rows = _read_rows(path)
    if header != RETURN_HEADER:
        raise SchemaError(f"{path}: expected header {','.join(RETURN_HEADER)!r}, got {','.join(header)!r}")
    dates, rets = [], []
    for i, row in enumerate(rows, start=2):
        if len(row) != 2:
            raise SchemaError(f"{path}, line {i}: expected 2 columns, got {len(row)}")
        dates.append(_parse_date(path, row[0], i))
        value = _parse_float(path, row[1], i, "return")
        if value <= -1.0:
            raise SchemaError(f"{path}, line {i}: simple return must exceed -1, got {value}")
        rets.append(value)
    try:
        return ReturnSeries(asset_id, tuple(dates), np.array(rets))
    except ValueError as exc:
        raise SchemaError(f"{path}: {exc}") from exc


def load_series_csv(path: Union[str, Path], asset_id: str) -> ReturnSeries:
    """Read either input schema, converting prices to simple returns."""
    header, _ = _read_rows(path)
    if header == PRICE_HEADER:
        from .series import simple_returns

        return simple_returns(load_price_csv(path, asset_id))
    if header == RETURN_HEADER:
        return load_return_csv(path, asset_id)
    raise SchemaError(f"{path}: unrecognized header {','.join(header)!r}")


def load_external_forecasts(
    path: Union[str, Path], asset_id: str, model_id: str
) -> dict[float, ForecastSeries]:
    """Read a ``date,level,var_forecast`` file into one series per level.

    Rows may arrive in any order; each level's rows are sorted by date.
    Duplicate (date, level) pairs are a schema error.
    """
    path = Path(path)
    header, rows = _read_rows(path)
    if header != FORECAST_HEADER:
        raise SchemaError(
            f"{path}: expected header {','.join(FORECAST_HEADER)!r}, got {','.join(header)!r}"
        )
    by_level: dict[float, dict[date, float]] = {}
    for i, row in enumerate(rows, start=2):
        if len(row) != 3:
            raise SchemaError(f"{path}, line {i}: expected 3 columns, got {len(row)}")
        d = _parse_date(path, row[0], i)
        level = _parse_float(path, row[1], i, "level")
        if not 0.0 < level < 1.0:
            raise SchemaError(f"{path}, line {i}: level must lie in (0, 1), got {level}")
        value = _parse_float(path, row[2], i, "var_forecast")
        per_date = by_level.setdefault(level, {})
        if d in per_date:
            raise SchemaError(f"{path}, line {i}: duplicate forecast for ({d}, {level})")
        per_date[d] = value
    out = {}
    for level, per_date in by_level.items():
        dates = tuple(sorted(per_date))
        values = np.array([per_date[d] for d in dates])
        try:
            out[level] = ForecastSeries(asset_id, model_id, level, dates, values)
        except ValueError as exc:
            raise SchemaError(f"{path}: {exc}") from exc
    return out


def write_return_csv(path: Union[str, Path], series: ReturnSeries) -> None:
    """Write a ``date,return`` file at full float precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RETURN_HEADER)
        for d, r in zip(series.dates, series.returns):
            writer.writerow([d.isoformat(), repr(float(r))])


def write_forecast_csv(path: Union[str, Path], series_by_level: dict[float, ForecastSeries]) -> None:
    """Write one asset's forecasts for all levels at full float precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FORECAST_HEADER)
        for level in sorted(series_by_level):
            series = series_by_level[level]
            for d, v in zip(series.dates, series.values):
                writer.writerow([d.isoformat(), repr(float(level)), repr(float(v))])
