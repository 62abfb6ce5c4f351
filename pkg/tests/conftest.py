"""Shared test helpers."""

from __future__ import annotations

from datetime import date

import numpy as np
import pytest

from varbench.series import ReturnSeries, consecutive_dates


def make_returns(values, asset_id="test", start=date(2020, 1, 1)) -> ReturnSeries:
    values = np.asarray(values, dtype=float)
    return ReturnSeries(asset_id, consecutive_dates(start, values.size), values)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
