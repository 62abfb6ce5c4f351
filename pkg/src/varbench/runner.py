"""End-to-end run orchestration.

Loads asset files, fits every configured model on the training segment with
frozen parameters, produces one-day-ahead VaR forecasts across the test
segment, joins external forecast files, and backtests everything.  Failures
are isolated per (asset, model) so one bad combination never blocks the rest.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import yaml

from .backtest import BacktestReport, QuantileScores, evaluate_forecasts
from .dist import validate_level
from .errors import ConfigError, InvalidInputError, SchemaError, VarBenchError
from .forecast import ForecastSeries
from .io import load_external_forecasts, load_series_csv
from .models import fit_garch, fit_gas, garch_filter, gas_filter, historical_var
from .series import ReturnSeries, SplitSpec, WindowSpec, rolling_windows, split

__all__ = ["ModelSpec", "RunConfig", "ReportBundle", "Failure", "load_config", "run"]

MODEL_KINDS = ("historical", "garch", "gas", "external")
VALID_CADENCES = (1, 21, 63)


@dataclass(frozen=True)
class ModelSpec:
    """One configured forecast source."""

    model_id: str
    kind: str
    dist: str = "normal"  # garch only
    mean: str = "constant"  # garch only
    path: Optional[Path] = None  # external only: directory holding <asset>.csv

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ConfigError(f"unknown model kind {self.kind!r}")
        if self.kind == "external" and self.path is None:
            raise ConfigError(f"external model {self.model_id!r} needs a path")


@dataclass(frozen=True)
class RunConfig:
    assets: tuple[tuple[str, Path], ...]
    split: SplitSpec
    levels: tuple[float, ...]
    models: tuple[ModelSpec, ...]
    cadences: tuple[int, ...] = (1,)
    window: int = 512
    seed: int = 0
    dq_lags: int = 4
    workers: int = 1
    output_dir: Optional[Path] = None

    def __post_init__(self):
        if not self.models:
            raise ConfigError("configure at least one model")
        if not self.levels:
            raise ConfigError("configure at least one quantile level")
        if not self.assets:
            raise ConfigError("configure at least one asset")
        for level in self.levels:
            try:
                validate_level(level)
            except InvalidInputError as exc:
                raise ConfigError(str(exc)) from exc
        for c in self.cadences:
            if c < 1:
                raise ConfigError(f"cadence must be positive, got {c}")
        if self.window < 2:
            raise ConfigError("window must be at least 2 observations")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        ids = [m.model_id for m in self.models]
        if len(set(ids)) != len(ids):
            raise ConfigError("model ids must be unique")
        names = [a for a, _ in self.assets]
        if len(set(names)) != len(names):
            raise ConfigError("asset ids must be unique")


@dataclass(frozen=True)
class Failure:
    """Diagnostic for one combination that produced no report."""

    asset_id: str
    model_id: str
    level: Optional[float]
    stage: str
    message: str


@dataclass
class ReportBundle:
    """Everything a run produced, keyed by (model, asset, level)."""

    model_ids: list[str]
    asset_ids: list[str]
    levels: list[float]
    seed: int
    test_returns: dict[str, ReturnSeries]
    forecasts: dict[tuple[str, str], dict[float, ForecastSeries]]
    reports: dict[tuple[str, str, float], BacktestReport]
    scores: dict[tuple[str, str, float], QuantileScores] = field(repr=False, default_factory=dict)
    failures: list[Failure] = field(default_factory=list)

    def models_covering_level(self, level: float) -> list[str]:
        """Models with a successful report on every asset at this level."""
        return [
            m
            for m in self.model_ids
            if all((m, a, level) in self.reports for a in self.asset_ids)
        ]


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ConfigError(f"missing {key!r} in {context}")
    return mapping[key]


def load_config(path: Union[str, Path]) -> RunConfig:
    """Parse and validate a YAML run configuration.

    Relative asset and forecast paths resolve against the config file's
    directory.
    """
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a mapping")
    base = path.parent

    run_section = raw.get("run", {})
    split_section = _require(raw, "split", str(path))
    try:
        split_spec = SplitSpec(
            train_end=_require(split_section, "train_end", "split"),
            test_end=_require(split_section, "test_end", "split"),
            validation_end=split_section.get("validation_end"),
        )
    except InvalidInputError as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    assets = []
    for entry in _require(raw, "assets", str(path)):
        assets.append((str(_require(entry, "id", "asset")), base / _require(entry, "path", "asset")))

    models = []
    for entry in _require(raw, "models", str(path)):
        kind = str(_require(entry, "kind", "model"))
        models.append(
            ModelSpec(
                model_id=str(_require(entry, "id", "model")),
                kind=kind,
                dist=str(entry.get("dist", "normal")),
                mean=str(entry.get("mean", "constant")),
                path=(base / entry["path"]) if entry.get("path") else None,
            )
        )

    out_dir = run_section.get("output_dir")
    return RunConfig(
        assets=tuple(assets),
        split=split_spec,
        levels=tuple(float(x) for x in run_section.get("levels", [0.01, 0.025, 0.05, 0.1])),
        models=tuple(models),
        cadences=tuple(int(c) for c in run_section.get("cadences", [1])),
        window=int(run_section.get("window", 512)),
        seed=int(run_section.get("seed", 0)),
        dq_lags=int(run_section.get("dq_lags", 4)),
        workers=int(run_section.get("workers", 1)),
        output_dir=(base / out_dir) if out_dir else None,
    )


def _instance_ids(spec: ModelSpec, cadences: Sequence[int]) -> list[tuple[str, int]]:
    """Expand a window-based model into one instance per refresh cadence."""
    if spec.kind == "historical":
        return [(spec.model_id if c == 1 else f"{spec.model_id}-{c}d", c) for c in cadences]
    return [(spec.model_id, 1)]


def _model_seed(base_seed: int, asset_index: int, model_index: int) -> int:
    seq = np.random.SeedSequence(base_seed, spawn_key=(asset_index, model_index))
    return int(seq.generate_state(1)[0])


def _historical_forecasts(
    series: ReturnSeries,
    test: ReturnSeries,
    instance_id: str,
    cadence: int,
    window: int,
    levels: Sequence[float],
) -> dict[float, ForecastSeries]:
    values: dict[float, list[float]] = {level: [] for level in levels}
    dates: list = []
    spec = WindowSpec(length=window, step=cadence)
    for win, target_dates in rolling_windows(series, spec, test.dates[0]):
        for level in levels:
            values[level].extend([historical_var(win, level)] * len(target_dates))
        dates.extend(target_dates)
    n_test = len(test)
    dates = dates[:n_test]  # windows tile the span from the origin to series end
    return {
        level: ForecastSeries(series.asset_id, instance_id, level, tuple(dates), np.array(values[level][:n_test]))
        for level in levels
    }


def _test_slice(series: ReturnSeries, test: ReturnSeries) -> tuple[int, int]:
    """Positions of the test segment within the full series."""
    start = series.dates.index(test.dates[0])
    return start, start + len(test)


def _garch_forecasts(
    series: ReturnSeries,
    train: ReturnSeries,
    test: ReturnSeries,
    spec: ModelSpec,
    levels: Sequence[float],
    seed: int,
) -> dict[float, ForecastSeries]:
    params = fit_garch(train, dist=spec.dist, mean_mode=spec.mean, seed=seed)
    mu_path, sigma_path = garch_filter(params, series)
    start, stop = _test_slice(series, test)
    out = {}
    for level in levels:
        values = mu_path[start:stop] + sigma_path[start:stop] * params.dist.quantile(level)
        out[level] = ForecastSeries(series.asset_id, spec.model_id, level, test.dates, values)
    return out


def _gas_forecasts(
    series: ReturnSeries,
    train: ReturnSeries,
    test: ReturnSeries,
    spec: ModelSpec,
    level: float,
    seed: int,
) -> ForecastSeries:
    params = fit_gas(train, level, seed=seed)
    _, var_path = gas_filter(params, series)
    start, stop = _test_slice(series, test)
    return ForecastSeries(series.asset_id, spec.model_id, level, test.dates, var_path[start:stop])


def _external_forecasts(
    test: ReturnSeries, spec: ModelSpec, levels: Sequence[float]
) -> tuple[dict[float, ForecastSeries], list[Failure]]:
    """Join one external file against the test segment, level by level."""
    out: dict[float, ForecastSeries] = {}
    failures: list[Failure] = []
    file_path = spec.path / f"{test.asset_id}.csv"
    try:
        by_level = load_external_forecasts(file_path, test.asset_id, spec.model_id)
    except SchemaError as exc:
        return {}, [Failure(test.asset_id, spec.model_id, None, "load", str(exc))]

    def fail(level: float, message: str) -> None:
        failures.append(Failure(test.asset_id, spec.model_id, level, "join", message))

    test_set = set(test.dates)
    for level in levels:
        match = next(
            (lv for lv in by_level if math.isclose(lv, level, rel_tol=0, abs_tol=1e-12)), None
        )
        if match is None:
            fail(level, "level missing from forecast file")
            continue
        series = by_level[match]
        extra = [d for d in series.dates if d not in test_set]
        if extra:
            fail(level, f"{len(extra)} forecast date(s) outside the test span (first: {extra[0]})")
            continue
        if series.dates != test.dates:
            missing = sorted(test_set - set(series.dates))
            fail(level, f"{len(missing)} test date(s) missing from forecast file (first: {missing[0]})")
            continue
        out[level] = ForecastSeries(test.asset_id, spec.model_id, level, series.dates, series.values)
    return out, failures


def _produce_for_asset(args) -> tuple[str, dict, list]:
    """Forecast production for one asset across all models (worker task)."""
    (asset_id, series, config, asset_index) = args
    forecasts: dict[tuple[str, float], ForecastSeries] = {}
    failures: list[Failure] = []
    try:
        train, _, test = split(series, config.split)
    except VarBenchError as exc:
        return asset_id, {}, [Failure(asset_id, "*", None, "split", str(exc))]

    for model_index, spec in enumerate(config.models):
        seed = _model_seed(config.seed, asset_index, model_index)
        if spec.kind == "historical":
            for instance_id, cadence in _instance_ids(spec, config.cadences):
                try:
                    by_level = _historical_forecasts(
                        series, test, instance_id, cadence, config.window, config.levels
                    )
                    for level, fc in by_level.items():
                        forecasts[(instance_id, level)] = fc
                except VarBenchError as exc:
                    failures.append(Failure(asset_id, instance_id, None, "forecast", str(exc)))
        elif spec.kind == "garch":
            try:
                by_level = _garch_forecasts(series, train, test, spec, config.levels, seed)
                for level, fc in by_level.items():
                    forecasts[(spec.model_id, level)] = fc
            except VarBenchError as exc:
                failures.append(Failure(asset_id, spec.model_id, None, "fit", str(exc)))
        elif spec.kind == "gas":
            for level in config.levels:
                try:
                    fc = _gas_forecasts(series, train, test, spec, level, seed)
                    forecasts[(spec.model_id, level)] = fc
                except VarBenchError as exc:
                    failures.append(Failure(asset_id, spec.model_id, level, "fit", str(exc)))
        else:
            ext, ext_failures = _external_forecasts(test, spec, config.levels)
            failures.extend(ext_failures)
            for level, fc in ext.items():
                forecasts[(spec.model_id, level)] = fc
    return asset_id, forecasts, failures


def run(config: RunConfig) -> ReportBundle:
    """Execute a full benchmark run; deterministic given the config seed."""
    series_by_asset: dict[str, ReturnSeries] = {}
    for asset_id, path in config.assets:
        series_by_asset[asset_id] = load_series_csv(path, asset_id)

    model_ids: list[str] = []
    for spec in config.models:
        model_ids.extend(mid for mid, _ in _instance_ids(spec, config.cadences))

    tasks = [
        (asset_id, series_by_asset[asset_id], config, asset_index)
        for asset_index, (asset_id, _) in enumerate(config.assets)
    ]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            produced = list(pool.map(_produce_for_asset, tasks))
    else:
        produced = [_produce_for_asset(task) for task in tasks]

    bundle = ReportBundle(
        model_ids=model_ids,
        asset_ids=[a for a, _ in config.assets],
        levels=list(config.levels),
        seed=config.seed,
        test_returns={},
        forecasts={},
        reports={},
    )
    for (asset_id, forecasts, failures), (_, series, _, _) in zip(produced, tasks):
        try:
            _, _, test = split(series, config.split)
        except VarBenchError:
            bundle.failures.extend(failures)
            continue
        bundle.test_returns[asset_id] = test
        bundle.failures.extend(failures)
        for (model_id, level), fc in sorted(forecasts.items()):
            bundle.forecasts.setdefault((model_id, asset_id), {})[level] = fc
            try:
                report, scores = evaluate_forecasts(test, fc, dq_lags=config.dq_lags)
            except VarBenchError as exc:
                bundle.failures.append(Failure(asset_id, model_id, level, "backtest", str(exc)))
                continue
            bundle.reports[(model_id, asset_id, level)] = report
            bundle.scores[(model_id, asset_id, level)] = scores
    return bundle
