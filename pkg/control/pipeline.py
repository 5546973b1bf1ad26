"""
Feedforward ANC signal chain (linear loudspeaker):

    d = P * x          disturbance at the error mic
    y = canceller(x)   anti-noise
    a = S * y          anti-noise at the error mic
    e = d - a          residual
"""

import logging
from dataclasses import dataclass

from acoustics.room import PathPair
from control.cancellers import Canceller
from core.dsp import fft_convolve
from core.errors import ConfigurationError, InternalError
from core.signals import Waveform

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AncRun:
    x: Waveform
    d: Waveform
    y: Waveform
    a: Waveform
    e: Waveform
    canceller: str

    def __post_init__(self):
        lengths = {len(s) for s in (self.x, self.d, self.y, self.a, self.e)}
        if len(lengths) != 1:
            raise InternalError(f"AncRun signals are not aligned: lengths {sorted(lengths)}")

    def signals(self) -> dict[str, Waveform]:
        return {"x": self.x, "d": self.d, "y": self.y, "a": self.a, "e": self.e}


def run_pipeline(x: Waveform, paths: PathPair, canceller: Canceller) -> AncRun:
    if x.sample_rate_hz != paths.sample_rate_hz:
        raise ConfigurationError(
            f"Reference is sampled at {x.sample_rate_hz} Hz but the paths at {paths.sample_rate_hz} Hz"
        )
    d = fft_convolve(x, paths.primary)
    y = canceller.generate(x, d, paths.secondary)
    if y.sample_rate_hz != x.sample_rate_hz:
        raise ConfigurationError(f"Canceller {canceller.name} returned y at {y.sample_rate_hz} Hz")
    if len(y) != len(x):
        raise InternalError(f"Canceller {canceller.name} returned {len(y)} samples, expected {len(x)}")
    a = fft_convolve(y, paths.secondary)
    e = d.with_samples(d.samples - a.samples)
    logger.debug(f"Pipeline [{canceller.name}] done on {len(x)} samples")
    return AncRun(x=x, d=d, y=y, a=a, e=e, canceller=canceller.name)
