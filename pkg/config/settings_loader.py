"""
Centralized Settings Loader

Single point of access for the numerical defaults (Welch window, resampler, RIR kernel,
FxLMS, KDE, support threshold, dB floor). Modules import their defaults from here
instead of hard-coding them.

Usage:
    from config.settings_loader import get_setting, load_settings

    window = get_setting("dsp", "welch_window_len")
    floor_db = get_setting("report", "db_floor")

`config/settings.json`, when present, is overlaid on the shipped defaults section by
section. It is never written implicitly.
"""

import json
import logging
from pathlib import Path
from typing import Any

logger = logging.getLogger(__name__)

# Paths
CONFIG_DIR = Path(__file__).parent
SETTINGS_FILE = CONFIG_DIR / "settings.json"
DEFAULTS_FILE = CONFIG_DIR / "settings.defaults.json"

_settings_cache: dict | None = None


def _merge(base: dict, overlay: dict) -> dict:
    merged = dict(base)
    for key, value in overlay.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_settings() -> dict:
    """Load defaults plus the optional user overlay. Uses cache if already loaded."""
    global _settings_cache
    if _settings_cache is None:
        if not DEFAULTS_FILE.exists():
            raise FileNotFoundError(f"No settings defaults found in {CONFIG_DIR}")
        settings = json.loads(DEFAULTS_FILE.read_text())
        if SETTINGS_FILE.exists():
            try:
                settings = _merge(settings, json.loads(SETTINGS_FILE.read_text()))
                logger.debug(f"Applied settings overlay from {SETTINGS_FILE}")
            except json.JSONDecodeError as e:
                logger.warning(f"Ignoring unreadable settings overlay {SETTINGS_FILE}: {e}")
        _settings_cache = settings
    return _settings_cache


def reload_settings() -> dict:
    """Force reload settings from disk (useful after external changes)."""
    global _settings_cache
    _settings_cache = None
    return load_settings()


def get_setting(section: str, key: str) -> Any:
    """Get a single default, e.g. get_setting("kde", "bin_count")."""
    try:
        return load_settings()[section][key]
    except KeyError as e:
        raise KeyError(f"Unknown setting {section}.{key}") from e
