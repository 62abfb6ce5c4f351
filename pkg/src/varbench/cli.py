"""Command-line interface.

Exit codes: 0 on success, 2 on configuration or schema errors, 3 when a run
completed but some (asset, model) combinations failed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConfigError, SchemaError, VarBenchError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARTIAL = 3


def _cmd_run(args: argparse.Namespace) -> int:
    from .report import emit_reports
    from .runner import load_config, run

    try:
        config = load_config(args.config)
        out_dir = Path(args.out) if args.out else config.output_dir
        if out_dir is None:
            raise ConfigError("no output directory: set run.output_dir or pass --out")
        if args.workers is not None:
            from dataclasses import replace

            config = replace(config, workers=args.workers)
        bundle = run(config)
        emit_reports(bundle, out_dir)
    except (ConfigError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except VarBenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"report bundle written to {out_dir}")
    if bundle.failures:
        for f in bundle.failures:
            level = f.level if f.level is not None else "*"
            print(f"failed: {f.asset_id}/{f.model_id}@{level} [{f.stage}] {f.message}", file=sys.stderr)
        print(f"{len(bundle.failures)} combination(s) failed; see manifest.json", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    from .io import load_external_forecasts

    path = Path(args.forecasts)
    try:
        by_level = load_external_forecasts(path, asset_id=path.stem, model_id="external")
    except SchemaError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    levels = ", ".join(repr(lv) for lv in sorted(by_level))
    n = sum(len(series) for series in by_level.values())
    print(f"ok: {n} rows across levels {levels}")
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    from .report import emit_reports, load_bundle

    try:
        bundle = load_bundle(args.bundle, dq_lags=args.dq_lags)
        out_dir = Path(args.out) if args.out else Path(args.bundle)
        emit_reports(bundle, out_dir)
    except (ConfigError, SchemaError, VarBenchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"report tables written to {out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="varbench",
        description="One-day VaR forecasting benchmarks and backtesting battery.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="fit models, forecast, backtest, and emit reports")
    p_run.add_argument("--config", required=True, help="YAML run configuration")
    p_run.add_argument("--out", help="output directory (overrides run.output_dir)")
    p_run.add_argument("--workers", type=int, help="asset-level worker processes")
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate", help="check an external forecast file against the schema")
    p_val.add_argument("--forecasts", required=True, help="date,level,var_forecast CSV file")
    p_val.set_defaults(func=_cmd_validate)

    p_rep = sub.add_parser("report", help="re-score a stored bundle and rewrite its tables")
    p_rep.add_argument("--bundle", required=True, help="directory written by `varbench run`")
    p_rep.add_argument("--out", help="output directory (defaults to the bundle)")
    p_rep.add_argument("--dq-lags", type=int, default=4, help="hit lags in the dynamic-quantile test")
    p_rep.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
