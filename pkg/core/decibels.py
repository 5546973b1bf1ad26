"""dB conversion with a finite display floor."""

import math
from dataclasses import dataclass

from config.settings_loader import get_setting


@dataclass(frozen=True)
class Decibel:
    """A dB value; `floored` is True when the exact value was below the floor (or -inf)."""
    value: float
    floored: bool = False

    def __float__(self) -> float:
        return self.value


def power_ratio_db(ratio: float, floor_db: float | None = None) -> Decibel:
    """10*log10(ratio), clamped from below at the configured floor."""
    floor_db = get_setting("report", "db_floor") if floor_db is None else floor_db
    if ratio <= 0.0:
        return Decibel(floor_db, True)
    value = 10.0 * math.log10(ratio)
    if value < floor_db:
        return Decibel(floor_db, True)
    return Decibel(value, False)
