"""
Canceller strategies - everything that can produce the anti-noise y(n).

    NullCanceller      y = 0
    OracleCanceller    y = d (perfect when S is a unit impulse)
    FxlmsCanceller     adaptive FxLMS
    ExternalCanceller  y supplied by a third-party system (ingested WAV)
"""

from abc import ABC, abstractmethod

import numpy as np

from control.fxlms import FxlmsConfig, run_fxlms
from control.ingest import ingest_external_y
from core.signals import ImpulseResponse, Waveform
from schemas import CancellerSpec, FxlmsParams


class Canceller(ABC):
    """Produces y from the reference x; must be causal in x and d."""

    name: str = None

    @abstractmethod
    def generate(self, x: Waveform, d: Waveform, secondary: ImpulseResponse) -> Waveform:
        ...


class NullCanceller(Canceller):
    name = "null"

    def generate(self, x: Waveform, d: Waveform, secondary: ImpulseResponse) -> Waveform:
        return Waveform(np.zeros(len(x)), x.sample_rate_hz)


class OracleCanceller(Canceller):
    name = "oracle"

    def generate(self, x: Waveform, d: Waveform, secondary: ImpulseResponse) -> Waveform:
        return d


class FxlmsCanceller(Canceller):
    name = "fxlms"

    def __init__(self, params: FxlmsParams | None = None, config: FxlmsConfig | None = None):
        self.params = params or FxlmsParams()
        self.config = config

    def generate(self, x: Waveform, d: Waveform, secondary: ImpulseResponse) -> Waveform:
        config = self.config or FxlmsConfig.from_params(self.params, secondary)
        return run_fxlms(x, d, config, secondary)


class ExternalCanceller(Canceller):
    """
    y is taken as given. The external system's internal loop (its use of e(n)) cannot be
    reconstructed, so causality is the supplier's responsibility.
    """
    name = "external"

    def __init__(self, y: Waveform, provenance: tuple[str, ...] = ()):
        self.y = y
        self.provenance = provenance

    def generate(self, x: Waveform, d: Waveform, secondary: ImpulseResponse) -> Waveform:
        return self.y


def _instantiate(spec: CancellerSpec, sample_rate_hz: int, n_samples: int) -> Canceller:
    if spec.kind == "fxlms":
        return FxlmsCanceller(spec.fxlms)
    if spec.kind == "null":
        return NullCanceller()
    if spec.kind == "oracle":
        return OracleCanceller()
    ingested = ingest_external_y(spec.path, sample_rate_hz, n_samples)
    return ExternalCanceller(ingested.waveform, ingested.provenance)


def build_canceller(spec: CancellerSpec, sample_rate_hz: int, n_samples: int) -> Canceller:
    """Canceller for a CancellerSpec, named by its label so report rows stay distinct."""
    canceller = _instantiate(spec, sample_rate_hz, n_samples)
    canceller.name = spec.label
    return canceller
