"""Command-line entry point: ``timesfm-export --config <file>``."""

from __future__ import annotations

import argparse
import sys

from .config import AdapterError, load_config
from .export import export_zero_shot


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="timesfm-export",
        description="Export rolling-window quantile forecasts as VaR interchange files.",
    )
    parser.add_argument("--config", required=True, help="YAML adapter configuration")
    args = parser.parse_args(argv)
    try:
        written = export_zero_shot(load_config(args.config))
    except AdapterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
