#!/usr/bin/env python3
"""Generate the bundled 3-asset synthetic dataset and its run configuration.

Writes price CSVs under data/synthetic/ plus configs/synthetic.yaml.  Output
is deterministic; re-running reproduces the committed files byte for byte.
"""

from __future__ import annotations

import csv
from datetime import timedelta
from pathlib import Path

import numpy as np

from varbench.dist import Normal, StudentT
from varbench.models import GarchParams, simulate_garch

ROOT = Path(__file__).resolve().parents[1]
N_RETURNS = 649  # 500 training days, 149 test days
TRAIN_LEN = 500

ASSETS = {
    # fraction-scale daily returns, unconditional vol 1.3% - 2.2%
    "blue": (GarchParams(mu=3e-4, omega=8e-6, alpha1=0.06, beta1=0.90, dist=Normal()), 11),
    "cyclical": (GarchParams(mu=1e-4, omega=2e-5, alpha1=0.10, beta1=0.86, dist=StudentT(7.0)), 22),
    "smallcap": (GarchParams(mu=5e-4, omega=5e-5, alpha1=0.09, beta1=0.81, dist=StudentT(5.0)), 33),
}


def main() -> None:
    data_dir = ROOT / "data" / "synthetic"
    data_dir.mkdir(parents=True, exist_ok=True)
    split_dates = {}
    for asset_id, (params, seed) in ASSETS.items():
        sim = simulate_garch(params, N_RETURNS, seed=seed, asset_id=asset_id)
        prices = 50.0 * np.cumprod(np.concatenate(([1.0], 1.0 + sim.returns)))
        # the price series has one extra leading day, so returns derive exactly
        dates = (sim.dates[0] - timedelta(days=1),) + sim.dates
        with (data_dir / f"{asset_id}.csv").open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["date", "price"])
            for d, p in zip(dates, prices):
                writer.writerow([d.isoformat(), repr(float(p))])
        split_dates[asset_id] = (sim.dates[TRAIN_LEN - 1], sim.dates[-1])

    (train_end, test_end) = next(iter(split_dates.values()))
    config = f"""\
run:
  seed: 7
  levels: [0.01, 0.025, 0.05, 0.1]
  window: 256
  cadences: [1, 21]
  output_dir: ../reports/synthetic
split:
  train_end: {train_end.isoformat()}
  test_end: {test_end.isoformat()}
assets:
  - id: blue
    path: ../data/synthetic/blue.csv
  - id: cyclical
    path: ../data/synthetic/cyclical.csv
  - id: smallcap
    path: ../data/synthetic/smallcap.csv
models:
  - id: historical
    kind: historical
  - id: g-n
    kind: garch
    dist: normal
  - id: g-t
    kind: garch
    dist: t
  - id: g-edf
    kind: garch
    dist: edf
  - id: gas
    kind: gas
"""
    configs = ROOT / "configs"
    configs.mkdir(exist_ok=True)
    (configs / "synthetic.yaml").write_text(config, encoding="utf-8")
    print(f"wrote {len(ASSETS)} price files; train_end={train_end} test_end={test_end}")


if __name__ == "__main__":
    main()
