"""
Experiment Config Loader

Reads an experiment YAML file, applies `key.path=value` overrides and validates the
result into an ExperimentConfig.

Usage:
    from config.experiment_loader import load_experiment

    config = load_experiment("config/experiment.yaml", ["seed=3", "t60_list=[0.15, 0.25]"])

Override values are parsed as YAML scalars or flow lists, so `kde.bin_count=256`,
`room.highpass_enabled=false` and `cancellers=[{kind: fxlms}, {kind: "null"}]` all work.
"""

import logging
from pathlib import Path
from typing import Iterable

import yaml
from pydantic import ValidationError

from core.errors import ConfigurationError
from schemas import ExperimentConfig

logger = logging.getLogger(__name__)

CONFIG_DIR = Path(__file__).parent
DEFAULT_EXPERIMENT = CONFIG_DIR / "experiment.yaml"


def parse_override(item: str) -> tuple[list[str], object]:
    key, sep, raw = item.partition("=")
    if not sep or not key.strip():
        raise ConfigurationError(f"Override {item!r} must look like key.path=value")
    try:
        value = yaml.safe_load(raw)
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Override {item!r}: cannot parse value: {e}") from e
    return key.strip().split("."), value


def apply_overrides(raw: dict, overrides: Iterable[str]) -> dict:
    for item in overrides:
        keys, value = parse_override(item)
        node = raw
        for k in keys[:-1]:
            child = node.get(k)
            if child is None:
                child = node[k] = {}
            if not isinstance(child, dict):
                raise ConfigurationError(f"Override {item!r}: {k!r} is not a section")
            node = child
        node[keys[-1]] = value
        logger.debug(f"Override {'.'.join(keys)} = {value!r}")
    return raw


def load_experiment(path: str | Path | None = None, overrides: Iterable[str] = ()) -> ExperimentConfig:
    """Validated experiment config; with no path, the defaults are used (plus overrides)."""
    raw: dict = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigurationError(f"Experiment config not found: {path}")
        try:
            raw = yaml.safe_load(path.read_text()) or {}
        except yaml.YAMLError as e:
            raise ConfigurationError(f"Cannot parse {path}: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigurationError(f"{path} must contain a mapping at the top level")
    raw = apply_overrides(raw, overrides)
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid experiment config: {e}") from e
