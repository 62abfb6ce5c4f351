"""Report bundle serialization: delimited tables, figures, and a summary.

Layout written under the output directory:

* ``returns/<asset>.csv`` - test-segment returns (``date,return``)
* ``forecasts/<model>/<asset>.csv`` - all forecasts in the interchange schema
* ``tables/*.csv`` - the cross-sectional evaluation tables
* ``figures/*.png`` - pass-count and score bar charts
* ``summary.txt`` - human-readable digest
* ``manifest.json`` - run metadata enabling ``varbench report`` re-scoring

Numeric formatting in tables: three decimals for metrics, scientific
notation for p-values below 1e-3, full float precision in the returns and
forecast files so re-scoring is exact.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Mapping, Sequence, Union

from .backtest import (
    SIGNIFICANCE_LEVELS,
    ae_dev_ttest,
    cross_section_summary,
    dm_test,
    evaluate_forecasts,
    skill_matrix,
)
from .errors import ConfigError, InvalidInputError, SchemaError
from .figures import pass_count_figure, score_bar_figure
from .io import load_external_forecasts, load_return_csv, write_forecast_csv, write_return_csv
from .runner import Failure, ReportBundle

__all__ = ["emit_reports", "load_bundle"]

_TESTS = ("uc", "cc", "dq")


def _fmt(x: float) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "NA"
    return f"{x:.3f}"


def _fmt_p(p: float) -> str:
    if p is None or (isinstance(p, float) and math.isnan(p)):
        return "NA"
    if p < 1e-3:
        return f"{p:.3e}"
    return f"{p:.3f}"


def _fmt_level(level: float) -> str:
    return repr(float(level))


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _master_rows(bundle: ReportBundle) -> list[list]:
    rows = []
    for level in bundle.levels:
        for model in bundle.model_ids:
            for asset in bundle.asset_ids:
                key = (model, asset, level)
                if key not in bundle.reports:
                    continue
                r = bundle.reports[key]
                rows.append(
                    [
                        asset,
                        model,
                        _fmt_level(level),
                        r.n_obs,
                        r.violations,
                        _fmt(r.ae),
                        _fmt(r.uc.statistic),
                        _fmt_p(r.uc.p_value),
                        _fmt(r.cc.statistic),
                        _fmt_p(r.cc.p_value),
                        _fmt(r.dq.statistic),
                        _fmt_p(r.dq.p_value),
                        _fmt(r.mean_qs),
                        _fmt(r.total_qs),
                        "degenerate" if (r.cc.degenerate or r.dq.degenerate) else "ok",
                    ]
                )
    return rows


def _summary_table(
    bundle: ReportBundle, metric_name: str
) -> tuple[list[str], list[list]]:
    header = ["level", "model", "min", "mean", "median", "max", "sd", "best_count", "top2_count"]
    rows = []
    for level in bundle.levels:
        models = bundle.models_covering_level(level)
        if not models:
            continue
        metric = {}
        for model in models:
            for asset in bundle.asset_ids:
                report = bundle.reports[(model, asset, level)]
                value = abs(1.0 - report.ae) if metric_name == "ae_dev" else report.mean_qs
                metric[(model, asset)] = value
        summary = cross_section_summary(metric, models, bundle.asset_ids)
        for model in models:
            s = summary[model]
            rows.append(
                [
                    _fmt_level(level),
                    model,
                    _fmt(s.minimum),
                    _fmt(s.mean),
                    _fmt(s.median),
                    _fmt(s.maximum),
                    _fmt(s.sd),
                    s.best_count,
                    s.top2_count,
                ]
            )
    return header, rows


def _pass_counts(bundle: ReportBundle, test_name: str) -> tuple[list[str], list[list], dict]:
    header = ["level", "significance", *bundle.model_ids]
    rows = []
    chart_data: dict[float, dict[float, list[int]]] = {}
    for level in bundle.levels:
        chart_data[level] = {}
        for sig in SIGNIFICANCE_LEVELS:
            counts = []
            for model in bundle.model_ids:
                n = 0
                for asset in bundle.asset_ids:
                    report = bundle.reports.get((model, asset, level))
                    if report is None:
                        continue
                    result = getattr(report, test_name)
                    if not math.isnan(result.p_value) and result.p_value > sig:
                        n += 1
                counts.append(n)
            rows.append([_fmt_level(level), repr(sig), *counts])
            chart_data[level][sig] = counts
    return header, rows, chart_data


def _ae_ttest_matrices(
    bundle: ReportBundle, level: float, models: Sequence[str]
) -> tuple[list[list], list[list]]:
    devs = {
        m: [abs(1.0 - bundle.reports[(m, a, level)].ae) for a in bundle.asset_ids] for m in models
    }
    n_assets = len(bundle.asset_ids)
    diff_rows, p_rows = [], []
    for mi in models:
        diff_row, p_row = [mi], [mi]
        for mj in models:
            if mi == mj:
                diff_row.append(_fmt(0.0))
                p_row.append("NA")
                continue
            mean_diff = sum(di - dj for di, dj in zip(devs[mi], devs[mj])) / n_assets
            diff_row.append(_fmt(mean_diff))
            if n_assets < 3:  # the two-sample test needs a cross-section
                p_row.append("NA")
            else:
                p_row.append(_fmt_p(ae_dev_ttest(devs[mi], devs[mj]).p_value))
        diff_rows.append(diff_row)
        p_rows.append(p_row)
    return diff_rows, p_rows


def _dm_share_rows(bundle: ReportBundle, level: float, models: Sequence[str]) -> list[list]:
    rows = []
    n_assets = len(bundle.asset_ids)
    too_short = any(
        bundle.scores[(models[0], a, level)].per_day.size < 30 for a in bundle.asset_ids
    )
    for mi in models:
        for mj in models:
            if mi == mj:
                continue
            if too_short:  # comparison test undefined on very short spans
                rows.append([mi, mj, *["NA"] * len(SIGNIFICANCE_LEVELS)])
                continue
            shares = []
            for sig in sorted(SIGNIFICANCE_LEVELS, reverse=True):
                rejected = 0
                for asset in bundle.asset_ids:
                    res = dm_test(
                        bundle.scores[(mi, asset, level)].per_day,
                        bundle.scores[(mj, asset, level)].per_day,
                    )
                    if res.rejects_at(sig):
                        rejected += 1
                shares.append(_fmt(rejected / n_assets))
            rows.append([mi, mj, *shares])
    return rows


def emit_reports(bundle: ReportBundle, out_dir: Union[str, Path]) -> list[Path]:
    """Write every table, figure, and data file for a completed run."""
    if not bundle.reports:
        raise InvalidInputError("report bundle holds no successful backtests; nothing to emit")
    out = Path(out_dir)
    tables = out / "tables"
    figures = out / "figures"
    written: list[Path] = []

    for asset in bundle.asset_ids:
        if asset in bundle.test_returns:
            path = out / "returns" / f"{asset}.csv"
            write_return_csv(path, bundle.test_returns[asset])
            written.append(path)
    for model in bundle.model_ids:
        for asset in bundle.asset_ids:
            by_level = bundle.forecasts.get((model, asset))
            if by_level:
                path = out / "forecasts" / model / f"{asset}.csv"
                write_forecast_csv(path, by_level)
                written.append(path)

    master = tables / "backtest_reports.csv"
    _write_csv(
        master,
        [
            "asset",
            "model",
            "level",
            "n_obs",
            "violations",
            "ae",
            "uc_stat",
            "uc_p",
            "cc_stat",
            "cc_p",
            "dq_stat",
            "dq_p",
            "mean_qs",
            "total_qs",
            "status",
        ],
        _master_rows(bundle),
    )
    written.append(master)

    for name, metric in (("ae_summary.csv", "ae_dev"), ("qs_summary.csv", "mean_qs")):
        header, rows = _summary_table(bundle, metric)
        _write_csv(tables / name, header, rows)
        written.append(tables / name)

    for test_name in _TESTS:
        header, rows, chart_data = _pass_counts(bundle, test_name)
        path = tables / f"{test_name}_pass_counts.csv"
        _write_csv(path, header, rows)
        written.append(path)
        for level in bundle.levels:
            fig_path = figures / f"{test_name}_pass_counts_{_fmt_level(level)}.png"
            pass_count_figure(
                chart_data[level],
                bundle.model_ids,
                len(bundle.asset_ids),
                f"{test_name.upper()} pass counts, VaR level {_fmt_level(level)}",
                fig_path,
            )
            written.append(fig_path)

    for level in bundle.levels:
        models = bundle.models_covering_level(level)
        if not models:
            continue
        diff_rows, p_rows = _ae_ttest_matrices(bundle, level, models)
        for suffix, rows in (("diff", diff_rows), ("p", p_rows)):
            path = tables / f"ae_ttest_{suffix}_{_fmt_level(level)}.csv"
            _write_csv(path, ["model", *models], rows)
            written.append(path)

        losses = {
            (m, a): bundle.reports[(m, a, level)].total_qs
            for m in models
            for a in bundle.asset_ids
        }
        matrix = skill_matrix(losses, models, bundle.asset_ids)
        rows = [
            [mi, *[_fmt(matrix[i, j]) for j in range(len(models))]] for i, mi in enumerate(models)
        ]
        path = tables / f"skill_matrix_{_fmt_level(level)}.csv"
        _write_csv(path, ["benchmark", *models], rows)
        written.append(path)

        path = tables / f"dm_reject_share_{_fmt_level(level)}.csv"
        _write_csv(
            path,
            ["model_i", "model_j", *[f"share_at_{s}" for s in sorted(SIGNIFICANCE_LEVELS, reverse=True)]],
            _dm_share_rows(bundle, level, models),
        )
        written.append(path)

        fig_path = figures / f"mean_qs_{_fmt_level(level)}.png"
        score_bar_figure(
            {m: [bundle.reports[(m, a, level)].mean_qs for a in bundle.asset_ids] for m in models},
            f"Mean quantile score, VaR level {_fmt_level(level)}",
            fig_path,
        )
        written.append(fig_path)

    summary = out / "summary.txt"
    _write_summary(bundle, summary)
    written.append(summary)

    manifest = out / "manifest.json"
    manifest.write_text(
        json.dumps(
            {
                "model_ids": bundle.model_ids,
                "asset_ids": bundle.asset_ids,
                "levels": bundle.levels,
                "seed": bundle.seed,
                "failures": [
                    {
                        "asset": f.asset_id,
                        "model": f.model_id,
                        "level": f.level,
                        "stage": f.stage,
                        "message": f.message,
                    }
                    for f in bundle.failures
                ],
            },
            indent=2,
            sort_keys=True,
        )
        + "\n",
        encoding="utf-8",
    )
    written.append(manifest)
    return written


def _write_summary(bundle: ReportBundle, path: Path) -> None:
    lines = []
    lines.append("VaR benchmark report")
    lines.append("====================")
    lines.append(f"assets: {', '.join(bundle.asset_ids)}")
    lines.append(f"models: {', '.join(bundle.model_ids)}")
    lines.append(f"levels: {', '.join(_fmt_level(lv) for lv in bundle.levels)}")
    lines.append(f"seed:   {bundle.seed}")
    lines.append("")
    for level in bundle.levels:
        models = bundle.models_covering_level(level)
        lines.append(f"VaR level {_fmt_level(level)}")
        lines.append("-" * 24)
        if not models:
            lines.append("  no model covers every asset at this level")
            lines.append("")
            continue
        header = f"  {'model':<16} {'mean |1-AE|':>12} {'mean QS':>10} {'UC pass':>8} {'CC pass':>8} {'DQ pass':>8}"
        lines.append(header)
        for model in models:
            reports = [bundle.reports[(model, a, level)] for a in bundle.asset_ids]
            mean_dev = sum(abs(1.0 - r.ae) for r in reports) / len(reports)
            mean_qs = sum(r.mean_qs for r in reports) / len(reports)
            passes = []
            for test_name in _TESTS:
                passes.append(
                    sum(
                        1
                        for r in reports
                        if not math.isnan(getattr(r, test_name).p_value)
                        and getattr(r, test_name).p_value > 0.05
                    )
                )
            lines.append(
                f"  {model:<16} {mean_dev:>12.3f} {mean_qs:>10.3f} "
                f"{passes[0]:>8} {passes[1]:>8} {passes[2]:>8}"
            )
        lines.append("")
    if bundle.failures:
        lines.append("failures")
        lines.append("--------")
        for f in bundle.failures:
            level_txt = _fmt_level(f.level) if f.level is not None else "*"
            lines.append(f"  {f.asset_id}/{f.model_id}@{level_txt} [{f.stage}]: {f.message}")
        lines.append("")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_bundle(bundle_dir: Union[str, Path], dq_lags: int = 4) -> ReportBundle:
    """Rebuild a bundle from stored returns and forecast files, re-scoring everything."""
    bundle_dir = Path(bundle_dir)
    manifest_path = bundle_dir / "manifest.json"
    if not manifest_path.exists():
        raise ConfigError(f"{bundle_dir}: missing manifest.json; not a report bundle")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))

    bundle = ReportBundle(
        model_ids=list(manifest["model_ids"]),
        asset_ids=list(manifest["asset_ids"]),
        levels=[float(x) for x in manifest["levels"]],
        seed=int(manifest["seed"]),
        test_returns={},
        forecasts={},
        reports={},
    )
    for asset in bundle.asset_ids:
        path = bundle_dir / "returns" / f"{asset}.csv"
        if path.exists():
            bundle.test_returns[asset] = load_return_csv(path, asset)
    for model in bundle.model_ids:
        for asset in bundle.asset_ids:
            path = bundle_dir / "forecasts" / model / f"{asset}.csv"
            if not path.exists() or asset not in bundle.test_returns:
                continue
            try:
                by_level = load_external_forecasts(path, asset, model)
            except SchemaError as exc:
                bundle.failures.append(Failure(asset, model, None, "load", str(exc)))
                continue
            bundle.forecasts[(model, asset)] = by_level
            for level, fc in sorted(by_level.items()):
                try:
                    report, scores = evaluate_forecasts(
                        bundle.test_returns[asset], fc, dq_lags=dq_lags
                    )
                except (InvalidInputError, ValueError) as exc:
                    bundle.failures.append(Failure(asset, model, level, "backtest", str(exc)))
                    continue
                bundle.reports[(model, asset, level)] = report
                bundle.scores[(model, asset, level)] = scores
    return bundle
