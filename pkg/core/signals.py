"""
Signal value types.

Waveform        - uniformly sampled real signal (x, d, y, a, e)
ImpulseResponse - FIR taps of an acoustic path (P or S)
PsdEstimate     - power spectral density on an ascending frequency grid

All three are immutable: the arrays are copied on construction and marked read-only,
so instances can be shared freely between threads and processes.
"""

import hashlib
from dataclasses import dataclass, field

import numpy as np

from core.errors import ArgumentError


def _frozen_array(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ArgumentError(f"{name} must be finite (no NaN/Inf)")
    arr.setflags(write=False)
    return arr


def _check_rate(rate) -> int:
    if int(rate) != rate or int(rate) <= 0:
        raise ArgumentError(f"sample_rate_hz must be a positive integer, got {rate}")
    return int(rate)


@dataclass(frozen=True)
class Waveform:
    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        object.__setattr__(self, "samples", _frozen_array(self.samples, "samples"))
        object.__setattr__(self, "sample_rate_hz", _check_rate(self.sample_rate_hz))

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate_hz

    def digest(self) -> str:
        """sha256 of the raw float64 samples (run manifests)."""
        return hashlib.sha256(self.samples.tobytes()).hexdigest()

    def with_samples(self, samples) -> "Waveform":
        return Waveform(samples, self.sample_rate_hz)


@dataclass(frozen=True)
class ImpulseResponse:
    taps: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        taps = _frozen_array(self.taps, "taps")
        if taps.size < 1:
            raise ArgumentError("ImpulseResponse needs at least one tap")
        object.__setattr__(self, "taps", taps)
        object.__setattr__(self, "sample_rate_hz", _check_rate(self.sample_rate_hz))

    def __len__(self) -> int:
        return self.taps.shape[0]

    @property
    def energy(self) -> float:
        """Sum of squared taps, the ||P||_2^2 term."""
        return float(np.dot(self.taps, self.taps))

    @property
    def direct_path_index(self) -> int:
        """
        First local maximum of |taps| that reaches 30% of the global peak.

        Coincident early reflections (e.g. floor and ceiling images at equal distance)
        can sum above the direct lobe, so the global argmax is not always the direct path.
        """
        mag = np.abs(self.taps)
        k = int(np.flatnonzero(mag >= 0.3 * mag.max())[0])
        while k + 1 < mag.size and mag[k + 1] > mag[k]:
            k += 1
        return k

    def direct_path_energy(self, half_width: int = 2) -> float:
        """Energy of the taps within +-half_width samples of the direct-path peak."""
        k = self.direct_path_index
        lobe = self.taps[max(0, k - half_width): k + half_width + 1]
        return float(np.dot(lobe, lobe))

    def scaled(self, gain: float) -> "ImpulseResponse":
        return ImpulseResponse(self.taps * gain, self.sample_rate_hz)

    @classmethod
    def unit(cls, sample_rate_hz: int, length: int = 1) -> "ImpulseResponse":
        taps = np.zeros(length)
        taps[0] = 1.0
        return cls(taps, sample_rate_hz)


@dataclass(frozen=True)
class PsdEstimate:
    freqs_hz: np.ndarray
    power_density: np.ndarray
    window_len: int
    overlap_frac: float
    one_sided: bool = True
    sample_rate_hz: int | None = field(default=None)

    def __post_init__(self):
        freqs = _frozen_array(self.freqs_hz, "freqs_hz")
        density = _frozen_array(self.power_density, "power_density")
        if freqs.shape != density.shape:
            raise ArgumentError("freqs_hz and power_density must have the same length")
        if freqs.size > 1 and np.any(np.diff(freqs) <= 0):
            raise ArgumentError("freqs_hz must be strictly ascending")
        if np.any(density < 0):
            raise ArgumentError("power_density must be nonnegative")
        if self.window_len < 1:
            raise ArgumentError("window_len must be positive")
        if not 0.0 <= self.overlap_frac < 1.0:
            raise ArgumentError("overlap_frac must lie in [0, 1)")
        object.__setattr__(self, "freqs_hz", freqs)
        object.__setattr__(self, "power_density", density)

    def at(self, freqs_hz) -> np.ndarray:
        """Density linearly interpolated onto another grid (e.g. FFT bin centres)."""
        return np.interp(np.asarray(freqs_hz, dtype=np.float64), self.freqs_hz, self.power_density)
