"""
WAV read/write (mono PCM 16-bit or IEEE float32).

Multi-channel files are reduced to channel 0; the caller learns about it through
`WavRead.channels` and a logged warning.
"""

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import soundfile as sf

from core.errors import ArgumentError
from core.signals import Waveform

logger = logging.getLogger(__name__)

SUBTYPES = {"float32": "FLOAT", "pcm16": "PCM_16"}


@dataclass(frozen=True)
class WavRead:
    waveform: Waveform
    channels: int
    subtype: str

    @property
    def downmixed(self) -> bool:
        return self.channels > 1


def read_wav(path: str | Path) -> WavRead:
    path = Path(path)
    data, rate = sf.read(str(path), dtype="float64", always_2d=True)
    info = sf.info(str(path))
    channels = data.shape[1]
    if channels > 1:
        logger.warning(f"{path.name}: {channels} channels, keeping channel 0 only")
    return WavRead(Waveform(data[:, 0], int(rate)), channels, info.subtype)


def write_wav(path: str | Path, waveform: Waveform, fmt: str = "float32") -> Path:
    if fmt not in SUBTYPES:
        raise ArgumentError(f"Unsupported WAV format {fmt!r}; expected one of {sorted(SUBTYPES)}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    samples = waveform.samples
    if fmt == "pcm16":
        peak = float(np.max(np.abs(samples))) if samples.size else 0.0
        if peak > 1.0:
            logger.warning(f"{path.name}: peak {peak:.3f} exceeds full scale, PCM16 output will clip")
        samples = np.clip(samples, -1.0, 1.0)
    sf.write(str(path), samples.astype(np.float32), waveform.sample_rate_hz, subtype=SUBTYPES[fmt])
    return path
