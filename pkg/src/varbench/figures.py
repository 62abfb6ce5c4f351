"""Bar-chart rendering for the report bundle (headless matplotlib)."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["pass_count_figure", "score_bar_figure"]

_PNG_METADATA = {"Software": "varbench"}


def pass_count_figure(
    counts_by_sig: Mapping[float, Sequence[int]],
    models: Sequence[str],
    n_assets: int,
    title: str,
    path: Path,
) -> None:
    """Grouped bars: per model, the asset count passing at each test size."""
    path.parent.mkdir(parents=True, exist_ok=True)
    sigs = sorted(counts_by_sig)
    x = np.arange(len(models), dtype=float)
    width = 0.8 / max(len(sigs), 1)
    fig, ax = plt.subplots(figsize=(max(6.0, 1.1 * len(models)), 4.0))
    for k, sig in enumerate(sigs):
        offset = (k - (len(sigs) - 1) / 2.0) * width
        ax.bar(x + offset, counts_by_sig[sig], width, label=f"size {sig:g}")
    ax.set_xticks(x)
    ax.set_xticklabels(models, rotation=30, ha="right")
    ax.set_ylim(0, max(n_assets, 1) * 1.05)
    ax.set_ylabel("assets passing")
    ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)


def score_bar_figure(
    scores_by_model: Mapping[str, Sequence[float]], title: str, path: Path
) -> None:
    """Cross-asset mean score per model with min/max whiskers."""
    path.parent.mkdir(parents=True, exist_ok=True)
    models = list(scores_by_model)
    means = [float(np.mean(scores_by_model[m])) for m in models]
    lows = [float(np.min(scores_by_model[m])) for m in models]
    highs = [float(np.max(scores_by_model[m])) for m in models]
    x = np.arange(len(models), dtype=float)
    fig, ax = plt.subplots(figsize=(max(6.0, 1.1 * len(models)), 4.0))
    ax.bar(x, means, 0.6)
    ax.vlines(x, lows, highs, colors="black", linewidth=1.0)
    ax.set_xticks(x)
    ax.set_xticklabels(models, rotation=30, ha="right")
    ax.set_ylabel("mean quantile score")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)
