"""
Synthetic noise surrogates and noise-input loading.

    white              Gaussian white noise
    engine_surrogate   harmonic comb on a broadband floor of equal power
    factory_surrogate  band-limited noise with decaying impulsive hits
    babble_surrogate   several band-passed noises, each amplitude-modulated at a syllabic rate

Every surrogate is scaled to the same RMS so sweeps compare like with like.
"""

import logging
from pathlib import Path

import numpy as np
import soundfile as sf
from scipy import signal as sps

from core.dsp import standardize
from core.errors import ArgumentError, IngestionError
from core.signals import Waveform
from core.wav_io import read_wav

logger = logging.getLogger(__name__)

NOISE_KINDS = ("white", "babble_surrogate", "engine_surrogate", "factory_surrogate")

# keeps 16-bit exports unclipped
DEFAULT_RMS = 0.1

ENGINE_F0_HZ = 120.0
ENGINE_HARMONICS = 8


def _bandpass(rng: np.random.Generator, n: int, fs: int, lo_hz: float, hi_hz: float) -> np.ndarray:
    hi_hz = min(hi_hz, 0.45 * fs)
    sos = sps.butter(4, [lo_hz, hi_hz], btype="bandpass", fs=fs, output="sos")
    return sps.sosfilt(sos, rng.standard_normal(n))


def _unit_power(v: np.ndarray) -> np.ndarray:
    p = float(np.mean(v * v))
    return v / np.sqrt(p) if p > 0 else v


def _engine(rng: np.random.Generator, n: int, fs: int) -> np.ndarray:
    t = np.arange(n) / fs
    comb = np.zeros(n)
    for k in range(1, ENGINE_HARMONICS + 1):
        f = k * ENGINE_F0_HZ
        if f >= 0.5 * fs:
            break
        comb += np.sin(2.0 * np.pi * f * t + rng.uniform(0.0, 2.0 * np.pi)) / k
    return _unit_power(comb) + _unit_power(rng.standard_normal(n))


def _factory(rng: np.random.Generator, n: int, fs: int) -> np.ndarray:
    bed = _unit_power(_bandpass(rng, n, fs, 200.0, 4000.0))
    hits = np.zeros(n)
    n_hits = rng.poisson(4.0 * n / fs)
    decay = np.exp(-np.arange(int(0.01 * fs * 5)) / (0.01 * fs))
    for start in np.sort(rng.integers(0, n, size=n_hits)):
        burst = 5.0 * decay * rng.standard_normal(decay.size)
        stop = min(n, start + burst.size)
        hits[start:stop] += burst[: stop - start]
    return bed + hits


def _babble(rng: np.random.Generator, n: int, fs: int, talkers: int = 6) -> np.ndarray:
    t = np.arange(n) / fs
    out = np.zeros(n)
    for _ in range(talkers):
        centre = rng.uniform(400.0, 2500.0)
        voice = _bandpass(rng, n, fs, 0.6 * centre, 1.6 * centre)
        rate = rng.uniform(3.0, 6.0)
        envelope = 0.5 * (1.0 + np.sin(2.0 * np.pi * rate * t + rng.uniform(0.0, 2.0 * np.pi)))
        out += _unit_power(voice) * envelope
    return out


_GENERATORS = {
    "white": lambda rng, n, fs: rng.standard_normal(n),
    "engine_surrogate": _engine,
    "factory_surrogate": _factory,
    "babble_surrogate": _babble,
}


def synth_noise(kind: str, seconds: float, fs: int, seed: int, rms: float = DEFAULT_RMS) -> Waveform:
    if kind not in _GENERATORS:
        raise ArgumentError(f"Unknown noise kind {kind!r}; expected one of {NOISE_KINDS}")
    if seconds <= 0:
        raise ArgumentError(f"Noise duration must be positive, got {seconds} s")
    n = int(round(seconds * fs))
    if n < 1:
        raise ArgumentError(f"{seconds} s at {fs} Hz is shorter than one sample")
    rng = np.random.default_rng(seed)
    samples = _unit_power(_GENERATORS[kind](rng, n, fs)) * rms
    return Waveform(samples, fs)


def load_noise_wav(path: str | Path, target_rate_hz: int, target_seconds: float) -> Waveform:
    """Read a user-supplied noise recording and standardize it to the evaluation format."""
    path = Path(path)
    try:
        read = read_wav(path)
    except (OSError, RuntimeError, sf.LibsndfileError) as e:
        raise IngestionError(f"Cannot read noise input {path}: {e}") from e
    wave = read.waveform
    if wave.duration_s < target_seconds:
        logger.warning(f"{path.name}: shorter than {target_seconds} s, zero-padding")
    return standardize(wave, target_rate_hz, target_seconds)
