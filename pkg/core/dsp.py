"""
Shared signal primitives: convolution, Welch PSD, power, resampling and
standardization to the 16 kHz / 3 s evaluation format.

All functions are pure; inputs are never modified.
"""

import logging
import math

import numpy as np
from scipy import integrate, signal as sps

from config.settings_loader import get_setting
from core.errors import ArgumentError, ConfigurationError
from core.signals import ImpulseResponse, PsdEstimate, Waveform

logger = logging.getLogger(__name__)


def fft_convolve(sig: Waveform, ir: ImpulseResponse, full: bool = False) -> Waveform:
    """
    Filter `sig` through `ir`.

    The result is truncated to the input length (causal streaming semantics) so that
    d, a and e stay sample-aligned; `full=True` returns all n + m - 1 samples.
    """
    if sig.sample_rate_hz != ir.sample_rate_hz:
        raise ConfigurationError(
            f"Sample-rate mismatch: signal {sig.sample_rate_hz} Hz vs IR {ir.sample_rate_hz} Hz"
        )
    if len(sig) == 0:
        raise ArgumentError("Cannot convolve an empty signal")
    out = sps.fftconvolve(sig.samples, ir.taps, mode="full")
    if not full:
        out = out[: len(sig)]
    return Waveform(out, sig.sample_rate_hz)


def signal_power(sig: Waveform) -> float:
    """Mean of squared samples."""
    if len(sig) == 0:
        raise ArgumentError("Power of an empty signal is undefined")
    return float(np.mean(np.square(sig.samples)))


def psd_power(psd: PsdEstimate) -> float:
    """Trapezoidal integral of the density over its band."""
    if psd.freqs_hz.size < 2:
        return 0.0
    return float(integrate.trapezoid(psd.power_density, psd.freqs_hz))


def welch_psd(
    sig: Waveform,
    window_len: int | None = None,
    overlap_frac: float | None = None,
) -> PsdEstimate:
    """
    One-sided Welch estimate (Hann taper) on the physical Hz grid.

    The averaged modified periodogram weights samples by the squared taper, so its
    integral is only a weighted mean of x^2. The estimate is therefore calibrated so
    that psd_power() of the result equals signal_power() of the input.
    """
    window_len = int(get_setting("dsp", "welch_window_len") if window_len is None else window_len)
    overlap_frac = get_setting("dsp", "welch_overlap_frac") if overlap_frac is None else overlap_frac
    if window_len < 2:
        raise ArgumentError(f"window_len must be at least 2, got {window_len}")
    if window_len > len(sig):
        raise ArgumentError(f"Window of {window_len} samples is longer than the signal ({len(sig)})")
    if not 0.0 <= overlap_frac < 1.0:
        raise ArgumentError(f"overlap_frac must lie in [0, 1), got {overlap_frac}")

    freqs, density = sps.welch(
        sig.samples,
        fs=sig.sample_rate_hz,
        window="hann",
        nperseg=window_len,
        noverlap=int(round(overlap_frac * window_len)),
        detrend=False,
        return_onesided=True,
        scaling="density",
    )
    raw = float(integrate.trapezoid(density, freqs))
    if raw > 0.0:
        density = density * (signal_power(sig) / raw)
    return PsdEstimate(
        freqs_hz=freqs,
        power_density=np.maximum(density, 0.0),
        window_len=window_len,
        overlap_frac=float(overlap_frac),
        one_sided=True,
        sample_rate_hz=sig.sample_rate_hz,
    )


def resample(sig: Waveform, target_rate_hz: int) -> Waveform:
    """Polyphase band-limited resampling with a Kaiser-windowed sinc kernel."""
    if target_rate_hz <= 0:
        raise ArgumentError(f"Target rate must be positive, got {target_rate_hz}")
    if sig.sample_rate_hz == target_rate_hz or len(sig) == 0:
        return Waveform(sig.samples, target_rate_hz)

    g = math.gcd(int(target_rate_hz), sig.sample_rate_hz)
    up, down = int(target_rate_hz) // g, sig.sample_rate_hz // g
    max_rate = max(up, down)
    half_len = (get_setting("dsp", "resampler_taps_per_phase") // 2) * max_rate
    kernel = sps.firwin(
        2 * half_len + 1,
        1.0 / max_rate,
        window=("kaiser", get_setting("dsp", "resampler_kaiser_beta")),
    )
    out = sps.resample_poly(sig.samples, up, down, window=kernel)
    logger.debug(f"Resampled {sig.sample_rate_hz} Hz -> {target_rate_hz} Hz ({len(sig)} -> {out.size} samples)")
    return Waveform(out, int(target_rate_hz))


def fit_length(sig: Waveform, n_samples: int) -> Waveform:
    """Trim or zero-pad to exactly n_samples."""
    if len(sig) == n_samples:
        return sig
    if len(sig) > n_samples:
        return sig.with_samples(sig.samples[:n_samples])
    return sig.with_samples(np.concatenate([sig.samples, np.zeros(n_samples - len(sig))]))


def standardize(sig: Waveform, target_rate_hz: int | None = None, target_seconds: float | None = None) -> Waveform:
    """Resample to the target rate, then trim or zero-pad to rate x seconds samples."""
    target_rate_hz = get_setting("dsp", "target_rate_hz") if target_rate_hz is None else target_rate_hz
    target_seconds = get_setting("dsp", "target_seconds") if target_seconds is None else target_seconds
    if target_rate_hz <= 0 or target_seconds <= 0:
        raise ArgumentError(
            f"Standardization targets must be positive (rate={target_rate_hz}, seconds={target_seconds})"
        )
    n_target = int(round(target_rate_hz * target_seconds))
    return fit_length(resample(sig, int(target_rate_hz)), n_target)
