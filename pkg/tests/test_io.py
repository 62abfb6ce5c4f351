"""Delimited-text schemas: round trips and rejection of malformed files."""

import numpy as np
import pytest

from varbench.errors import SchemaError
from varbench.io import (
    load_external_forecasts,
    load_price_csv,
    load_return_csv,
    load_series_csv,
    write_forecast_csv,
    write_return_csv,
)
from varbench.forecast import ForecastSeries

from conftest import make_returns


def test_price_round_trip(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("date,price\n2020-01-01,100\n2020-01-02,110\n2020-01-03,99\n")
    ps = load_price_csv(path, "abc")
    assert ps.asset_id == "abc"
    np.testing.assert_allclose(ps.prices, [100.0, 110.0, 99.0])
    rs = load_series_csv(path, "abc")
    np.testing.assert_allclose(rs.returns, [0.1, -0.1], rtol=1e-12)


def test_return_file_round_trip(tmp_path):
    rs = make_returns([0.01, -0.02, 0.003])
    path = tmp_path / "r.csv"
    write_return_csv(path, rs)
    back = load_return_csv(path, rs.asset_id)
    np.testing.assert_array_equal(back.returns, rs.returns)
    assert back.dates == rs.dates
    assert load_series_csv(path, rs.asset_id).dates == rs.dates


def test_forecast_round_trip(tmp_path):
    rs = make_returns([0.01, -0.02, 0.003])
    by_level = {
        0.05: ForecastSeries("a", "m", 0.05, rs.dates, np.array([-0.03, -0.031, -0.029])),
        0.01: ForecastSeries("a", "m", 0.01, rs.dates, np.array([-0.05, -0.052, -0.048])),
    }
    path = tmp_path / "f.csv"
    write_forecast_csv(path, by_level)
    back = load_external_forecasts(path, "a", "m")
    assert set(back) == {0.01, 0.05}
    for level in back:
        np.testing.assert_array_equal(back[level].values, by_level[level].values)
        assert back[level].dates == rs.dates


def test_decile_file_shape(tmp_path):
    # nine decile levels, one row per (date, level): the zero-shot export shape
    rs = make_returns(np.zeros(4) + 0.001)
    levels = [round(0.1 * k, 1) for k in range(1, 10)]
    rows = ["date,level,var_forecast"]
    for d in rs.dates:
        for lv in levels:
            rows.append(f"{d.isoformat()},{lv},{-2.0 + lv}")
    path = tmp_path / "dec.csv"
    path.write_text("\n".join(rows) + "\n")
    back = load_external_forecasts(path, "a", "pt1")
    assert len(back) == 9
    assert sorted(back) == sorted(levels)


def test_four_level_file_shape(tmp_path):
    rs = make_returns(np.zeros(3) + 0.001)
    levels = [0.01, 0.025, 0.05, 0.1]
    rows = ["date,level,var_forecast"]
    for d in rs.dates:
        for lv in levels:
            rows.append(f"{d.isoformat()},{lv},{-3.0 + lv}")
    path = tmp_path / "ft.csv"
    path.write_text("\n".join(rows) + "\n")
    assert len(load_external_forecasts(path, "a", "ft1")) == 4


@pytest.mark.parametrize(
    "content",
    [
        "",  # empty file
        "date,level,var_forecast\n",  # header only
        "date,price\n2020-01-01,100\n",  # wrong schema for forecasts
        "date,level,var_forecast\n2020-01-01,0.05,abc\n",  # non-numeric forecast
        "date,level,var_forecast\n2020-01-01,1.5,-2.0\n",  # level out of range
        "date,level,var_forecast\nnot-a-date,0.05,-2.0\n",  # bad date
        "date,level,var_forecast\n2020-01-01,0.05,-2.0\n2020-01-01,0.05,-2.1\n",  # duplicate
    ],
)
def test_forecast_schema_errors(tmp_path, content):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    with pytest.raises(SchemaError):
        load_external_forecasts(path, "a", "m")


def test_unsorted_rows_are_sorted(tmp_path):
    path = tmp_path / "f.csv"
    path.write_text(
        "date,level,var_forecast\n2020-01-02,0.05,-2.1\n2020-01-01,0.05,-2.0\n"
    )
    series = load_external_forecasts(path, "a", "m")[0.05]
    assert [d.isoformat() for d in series.dates] == ["2020-01-01", "2020-01-02"]
    np.testing.assert_array_equal(series.values, [-2.0, -2.1])


@pytest.mark.parametrize(
    "content",
    [
        "date,price\n2020-01-01,100\n",  # single price
        "date,price\n2020-01-01,100\n2020-01-02,-5\n",  # nonpositive price
        "date,price\n2020-01-01,100\n2020-01-01,101\n",  # duplicate date
        "date,price\n2020-01-01,100\n2020-01-02,\n",  # missing value
        "price,date\n100,2020-01-01\n",  # wrong header order
    ],
)
def test_price_schema_errors(tmp_path, content):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    with pytest.raises(SchemaError):
        load_price_csv(path, "a")


def test_return_below_minus_one_rejected(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("date,return\n2020-01-01,0.01\n2020-01-02,-1.5\n")
    with pytest.raises(SchemaError):
        load_return_csv(path, "a")
