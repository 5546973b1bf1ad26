"""Shared fixtures for the test modules (import this first: it puts the project root on sys.path)."""

import os
import sys

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

import numpy as np

from core.signals import ImpulseResponse, Waveform
from schemas import ExperimentConfig

FS = 16000

DEFAULT_ERROR_MIC = (1.5, 3.0, 1.0)
DEFAULT_REFERENCE_MIC = (1.5, 1.0, 1.0)
DEFAULT_SPEAKER = (1.5, 2.5, 1.0)


def white(n: int, seed: int = 0, fs: int = FS, scale: float = 1.0) -> Waveform:
    return Waveform(scale * np.random.default_rng(seed).standard_normal(n), fs)


def sine(freq_hz: float, n: int, fs: int = FS, amplitude: float = 1.0) -> Waveform:
    return Waveform(amplitude * np.sin(2.0 * np.pi * freq_hz * np.arange(n) / fs), fs)


def ir(taps, fs: int = FS) -> ImpulseResponse:
    return ImpulseResponse(np.asarray(taps, dtype=np.float64), fs)


def ideal_band_ir(fft_size: int, low: bool, fs: int = FS) -> ImpulseResponse:
    """IR whose fft_size-point spectrum is exactly 1 on one half of the band and 0 on the other."""
    n_bins = fft_size // 2 + 1
    mask = np.zeros(n_bins)
    if low:
        mask[: fft_size // 4] = 1.0
    else:
        mask[fft_size // 4:] = 1.0
    return ImpulseResponse(np.fft.irfft(mask, n=fft_size), fs)


def small_config(**overrides) -> ExperimentConfig:
    """A 1 s, single-T60 experiment that runs in a few seconds."""
    raw = {
        "t60_list": [0.2],
        "noise_inputs": [{"id": "white", "kind": "white"}],
        "cancellers": [{"kind": "fxlms", "fxlms": {"filter_len": 64}}, {"kind": "null"}],
        "signal": {"target_rate_hz": FS, "target_seconds": 1.0},
        "kde": {"frame_len": 4000, "frame_hop": 4000},
        "seed": 7,
    }
    raw.update(overrides)
    return ExperimentConfig.model_validate(raw)
