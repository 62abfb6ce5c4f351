"""Rolling-window export of quantile forecasts into the interchange schema."""

from __future__ import annotations

import csv
import math
from datetime import date
from pathlib import Path

import numpy as np

from .backends import DECILE_LEVELS, load_backend
from .config import AdapterConfig, AdapterError

__all__ = ["export_zero_shot", "read_return_csv"]

FORECAST_HEADER = ["date", "level", "var_forecast"]


def read_return_csv(path: Path) -> tuple[list[date], np.ndarray]:
    """Read a ``date,return`` file (the harness input schema)."""
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [row for row in csv.reader(fh) if row]
    except OSError as exc:
        raise AdapterError(f"{path}: cannot read return file ({exc})") from exc
    if not rows or [c.strip() for c in rows[0]] != ["date", "return"]:
        raise AdapterError(f"{path}: expected a 'date,return' CSV")
    dates: list[date] = []
    values: list[float] = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise AdapterError(f"{path}, line {i}: expected 2 columns")
        try:
            dates.append(date.fromisoformat(row[0].strip()))
            values.append(float(row[1]))
        except ValueError as exc:
            raise AdapterError(f"{path}, line {i}: {exc}") from exc
        if not math.isfinite(values[-1]) or values[-1] <= -1.0:
            raise AdapterError(f"{path}, line {i}: invalid simple return {row[1]!r}")
        if len(dates) > 1 and dates[-1] <= dates[-2]:
            raise AdapterError(f"{path}, line {i}: dates must be strictly increasing")
    if len(values) < 2:
        raise AdapterError(f"{path}: no usable return rows")
    return dates, np.asarray(values)


def _validate_rows(rows: list[tuple[date, float, float]], path: Path) -> None:
    """Check the output against the interchange schema before writing."""
    seen = set()
    for d, level, value in rows:
        if not 0.0 < level < 1.0:
            raise AdapterError(f"{path}: level {level} outside (0, 1)")
        if not math.isfinite(value):
            raise AdapterError(f"{path}: non-finite forecast for ({d}, {level})")
        key = (d, level)
        if key in seen:
            raise AdapterError(f"{path}: duplicate forecast row for {key}")
        seen.add(key)


def export_zero_shot(config: AdapterConfig) -> list[Path]:
    """Export decile VaR files for every configured asset.

    For each rolling origin the backend sees only the ``window`` most recent
    observations before the origin; the block of ``horizon`` forecast days
    shares that fixed window, and successive origins advance by the horizon
    so every forecast date is covered exactly once.
    """
    backend = load_backend(config.checkpoint, config.window, config.horizon)
    out_paths = []
    config.output_dir.mkdir(parents=True, exist_ok=True)
    for asset_id, path in config.assets:
        dates, values = read_return_csv(path)
        if config.start is None:
            first = config.window
        else:
            first = next((i for i, d in enumerate(dates) if d >= config.start), len(dates))
        if first >= len(dates):
            raise AdapterError(f"{asset_id}: no forecastable dates after the initial window")
        if first < config.window:
            raise AdapterError(
                f"{asset_id}: needs {config.window} observations before the first "
                f"forecast date, has {first}"
            )
        rows: list[tuple[date, float, float]] = []
        for origin in range(first, len(dates), config.horizon):
            block = dates[origin : origin + config.horizon]
            window = values[origin - config.window : origin]
            quantiles = backend.predict_quantiles(window, config.horizon)
            if quantiles.shape != (config.horizon, len(DECILE_LEVELS)):
                raise AdapterError(
                    f"backend returned shape {quantiles.shape}, expected "
                    f"({config.horizon}, {len(DECILE_LEVELS)})"
                )
            for day_offset, d in enumerate(block):
                for level, value in zip(DECILE_LEVELS, quantiles[day_offset]):
                    rows.append((d, level, float(value)))
        _validate_rows(rows, path)
        out_path = config.output_dir / f"{asset_id}.csv"
        with out_path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(FORECAST_HEADER)
            for d, level, value in rows:
                writer.writerow([d.isoformat(), repr(level), repr(value)])
        out_paths.append(out_path)
    return out_paths
