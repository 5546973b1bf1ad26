"""Ingestion of externally produced anti-noise signals (e.g. deep-model outputs)."""

import logging
from dataclasses import dataclass
from pathlib import Path

import soundfile as sf

from core.dsp import fit_length, resample
from core.errors import IngestionError
from core.signals import Waveform
from core.wav_io import read_wav

logger = logging.getLogger(__name__)

# resampling may round the output length by one sample
_LENGTH_TOLERANCE = 1


@dataclass(frozen=True)
class IngestedWaveform:
    waveform: Waveform
    provenance: tuple[str, ...] = ()


def ingest_external_y(path: str | Path, expected_rate: int, expected_len: int) -> IngestedWaveform:
    path = Path(path)
    try:
        read = read_wav(path)
    except (OSError, RuntimeError, sf.LibsndfileError) as e:
        raise IngestionError(f"Cannot read external y from {path}: {e}") from e

    flags: list[str] = []
    wave = read.waveform
    if read.downmixed:
        flags.append("downmixed")
    if wave.sample_rate_hz != expected_rate:
        logger.warning(f"{path.name}: resampling external y from {wave.sample_rate_hz} Hz to {expected_rate} Hz")
        wave = resample(wave, expected_rate)
        flags.append("resampled")

    diff = len(wave) - expected_len
    if abs(diff) > _LENGTH_TOLERANCE:
        raise IngestionError(
            f"{path.name}: {len(wave)} samples at {wave.sample_rate_hz} Hz after standardization, "
            f"expected {expected_len} ({expected_len / expected_rate:.3f} s); "
            f"the external signal must cover the same span as x"
        )
    if diff:
        wave = fit_length(wave, expected_len)
        flags.append("trimmed" if diff > 0 else "padded")
    return IngestedWaveform(wave, tuple(flags))
