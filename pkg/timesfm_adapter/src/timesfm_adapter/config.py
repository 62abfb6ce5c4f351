"""Adapter configuration."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Optional, Union

import yaml

__all__ = ["AdapterError", "AdapterConfig", "load_config"]

VALID_HORIZONS = (1, 21, 63)


class AdapterError(Exception):
    """Configuration, checkpoint, or schema failure in the exporter."""


@dataclass(frozen=True)
class AdapterConfig:
    """One export job: a checkpoint, a window geometry, and the asset files."""

    checkpoint: str
    assets: tuple[tuple[str, Path], ...]
    output_dir: Path
    window: int = 512
    horizon: int = 1
    start: Optional[date] = None  # first forecast date; default: right after the first window

    def __post_init__(self):
        if self.horizon not in VALID_HORIZONS:
            raise AdapterError(f"horizon must be one of {VALID_HORIZONS}, got {self.horizon}")
        if self.window < 2:
            raise AdapterError("window must be at least 2 observations")
        if not self.assets:
            raise AdapterError("configure at least one asset return file")


def load_config(path: Union[str, Path]) -> AdapterConfig:
    """Parse a YAML adapter configuration; relative paths resolve to the file."""
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise AdapterError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise AdapterError(f"cannot parse config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise AdapterError(f"{path}: config must be a mapping")
    base = path.parent
    try:
        assets = tuple(
            (str(entry["id"]), base / entry["path"]) for entry in raw["assets"]
        )
        return AdapterConfig(
            checkpoint=str(raw["checkpoint"]),
            assets=assets,
            output_dir=base / raw["output_dir"],
            window=int(raw.get("window", 512)),
            horizon=int(raw.get("horizon", 1)),
            start=raw.get("start"),
        )
    except KeyError as exc:
        raise AdapterError(f"{path}: missing config key {exc}") from exc
