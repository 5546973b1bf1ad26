"""Cancellation metrics and the unified bound."""

from core.decibels import Decibel, power_ratio_db
from core.dsp import signal_power
from core.errors import ArgumentError, UndefinedMetricError
from core.signals import Waveform


def nmse_db(e: Waveform, d: Waveform) -> Decibel:
    """10 log10(power(e) / power(d)); e = 0 gives the floor with the flag set."""
    if len(e) != len(d):
        raise ArgumentError(f"e and d must be aligned ({len(e)} vs {len(d)} samples)")
    if len(d) == 0:
        raise ArgumentError("NMSE of empty signals is undefined")
    pd_ = signal_power(d)
    if pd_ <= 0.0:
        raise UndefinedMetricError("Disturbance has zero power; NMSE is undefined")
    return power_ratio_db(signal_power(e) / pd_)


def tail_nmse_db(e: Waveform, d: Waveform, fraction: float = 0.25) -> Decibel:
    """NMSE over the final `fraction` of the samples (converged regime)."""
    if not 0.0 < fraction <= 1.0:
        raise ArgumentError(f"fraction must lie in (0, 1], got {fraction}")
    start = len(d) - max(1, int(round(fraction * len(d))))
    return nmse_db(e.with_samples(e.samples[start:]), d.with_samples(d.samples[start:]))


def unified_bound_db(info_db: float, support_db: float) -> float:
    return max(float(info_db), float(support_db))
