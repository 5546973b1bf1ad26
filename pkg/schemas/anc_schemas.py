"""
Pydantic Schemas for file-backed configuration and report rows

Defines the data models for:
- Room geometry and per-RIR room configuration
- Canceller selection (FxLMS parameters, null, external, oracle)
- KDE and support-bound estimator settings
- ExperimentConfig (one sweep)
- BoundRow (one report row)
"""

import hashlib
import json
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config.settings_loader import get_setting


Vec3 = Tuple[float, float, float]

NoiseKind = Literal["white", "babble_surrogate", "engine_surrogate", "factory_surrogate"]


def _default(section: str, key: str):
    return lambda: get_setting(section, key)


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


# =============================================================================
# Room
# =============================================================================

class RoomGeometry(StrictModel):
    """Shoebox room shared by every RIR of a scenario."""
    dims_m: Vec3 = (3.0, 4.0, 2.0)
    n_taps: int = Field(default_factory=_default("room", "n_taps"), ge=1)
    sample_rate_hz: int = Field(default_factory=_default("room", "sample_rate_hz"), gt=0)
    sound_speed_mps: float = Field(default_factory=_default("room", "sound_speed_mps"), gt=0)
    highpass_enabled: bool = True
    reflection_model: Literal["sabine", "eyring"] = Field(default_factory=_default("room", "reflection_model"))
    # where the primary path starts: a source collocated with the reference mic, or a separate noise source
    primary_source: Literal["reference_mic", "noise_source"] = "reference_mic"

    @field_validator("dims_m")
    @classmethod
    def _positive_dims(cls, v: Vec3) -> Vec3:
        if any(d <= 0 for d in v):
            raise ValueError(f"room dimensions must be positive, got {v}")
        return v


class RoomConfig(RoomGeometry):
    """One source/microphone pair inside the room at a given reverberation time."""
    source_pos_m: Vec3
    mic_pos_m: Vec3
    t60_s: float = Field(gt=0)
    # forces a uniform wall reflection coefficient instead of deriving it from t60_s
    beta_override: Optional[float] = Field(default=None, ge=0.0, le=1.0)

    def config_hash(self) -> str:
        return stable_hash(self.model_dump(mode="json"))


class Positions(StrictModel):
    error_mic: Vec3 = (1.5, 3.0, 1.0)
    reference_mic: Vec3 = (1.5, 1.0, 1.0)
    speaker: Vec3 = (1.5, 2.5, 1.0)
    noise_source: Optional[Vec3] = None


# =============================================================================
# Cancellers
# =============================================================================

class FxlmsParams(StrictModel):
    filter_len: int = Field(default_factory=_default("fxlms", "filter_len"), ge=1)
    step_size: float = Field(default_factory=_default("fxlms", "step_size"), ge=0.0)
    leak: float = Field(default_factory=_default("fxlms", "leak"), ge=0.0, lt=1.0)
    normalize: bool = Field(default_factory=_default("fxlms", "normalize"))
    # secondary-path estimate = estimate_gain * true S (1.0 = perfect estimate)
    estimate_gain: float = 1.0


class CancellerSpec(StrictModel):
    # row label; needed when two cancellers of one kind share a sweep
    id: Optional[str] = Field(default=None, min_length=1)
    kind: Literal["fxlms", "null", "external", "oracle"] = "fxlms"
    fxlms: FxlmsParams = Field(default_factory=FxlmsParams)
    path: Optional[str] = None

    @model_validator(mode="after")
    def _external_needs_path(self):
        if self.kind == "external" and not self.path:
            raise ValueError("external canceller needs a WAV path")
        return self

    @property
    def label(self) -> str:
        return self.id or self.kind


# =============================================================================
# Estimators
# =============================================================================

class KdeConfig(StrictModel):
    bin_count: int = Field(default_factory=_default("kde", "bin_count"), ge=8)
    bandwidth_scale: float = Field(default_factory=_default("kde", "bandwidth_scale"), gt=0)
    frame_len: int = Field(default_factory=_default("kde", "frame_len"), ge=1)
    frame_hop: int = Field(default_factory=_default("kde", "frame_hop"), ge=1)

    @model_validator(mode="after")
    def _hop_within_frame(self):
        if self.frame_hop > self.frame_len:
            raise ValueError(f"frame_hop ({self.frame_hop}) must not exceed frame_len ({self.frame_len})")
        return self


class SupportConfig(StrictModel):
    fft_size: int = Field(default_factory=_default("support", "fft_size"), ge=1)
    threshold_db: float = Field(default_factory=_default("support", "threshold_db"), gt=0)
    reference: Literal["peak", "absolute"] = Field(default_factory=_default("support", "reference"))


# =============================================================================
# Experiment
# =============================================================================

class NoiseInput(StrictModel):
    id: str
    kind: Optional[NoiseKind] = None
    path: Optional[str] = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.kind is None) == (self.path is None):
            raise ValueError(f"noise input {self.id!r} needs exactly one of 'kind' or 'path'")
        return self


class SignalConfig(StrictModel):
    target_rate_hz: int = Field(default_factory=_default("dsp", "target_rate_hz"), gt=0)
    target_seconds: float = Field(default_factory=_default("dsp", "target_seconds"), gt=0)


def _default_noises() -> List[NoiseInput]:
    kinds = ["white", "babble_surrogate", "engine_surrogate", "factory_surrogate"]
    return [NoiseInput(id=k, kind=k) for k in kinds]


def _default_cancellers() -> List[CancellerSpec]:
    return [CancellerSpec(kind="fxlms"), CancellerSpec(kind="null")]


class ExperimentConfig(StrictModel):
    room: RoomGeometry = Field(default_factory=RoomGeometry)
    positions: Positions = Field(default_factory=Positions)
    t60_list: List[float] = Field(default_factory=lambda: [0.15, 0.175, 0.2, 0.225, 0.25])
    noise_inputs: List[NoiseInput] = Field(default_factory=_default_noises)
    cancellers: List[CancellerSpec] = Field(default_factory=_default_cancellers)
    kde: KdeConfig = Field(default_factory=KdeConfig)
    support: SupportConfig = Field(default_factory=SupportConfig)
    signal: SignalConfig = Field(default_factory=SignalConfig)
    ep_mode: Literal["full", "direct"] = Field(default_factory=_default("report", "ep_mode"))
    support_variant: Literal["weighted", "bincount"] = Field(default_factory=_default("report", "support_variant"))
    seed: int = 0
    workers: int = Field(default=1, ge=1)

    @field_validator("t60_list")
    @classmethod
    def _positive_t60(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("t60_list must not be empty")
        if any(t <= 0 for t in v):
            raise ValueError(f"all reverberation times must be positive, got {v}")
        return v

    @model_validator(mode="after")
    def _unique_labels(self):
        for what, labels in (("noise input", [n.id for n in self.noise_inputs]),
                             ("canceller", [c.label for c in self.cancellers])):
            dupes = sorted({label for label in labels if labels.count(label) > 1})
            if dupes:
                raise ValueError(f"duplicate {what} labels {dupes}; give each entry a distinct id")
        return self

    @model_validator(mode="after")
    def _noise_source_available(self):
        if self.room.primary_source == "noise_source" and self.positions.noise_source is None:
            raise ValueError("room.primary_source = noise_source needs positions.noise_source")
        return self

    def config_hash(self) -> str:
        # workers does not change results
        return stable_hash(self.model_dump(mode="json", exclude={"workers"}))


# =============================================================================
# Report rows
# =============================================================================

class BoundRow(BaseModel):
    noise_id: str
    t60_s: float
    canceller: str
    nmse_db: Optional[float] = None
    info_bound_lin_db: Optional[float] = None
    info_bound_lin_full_db: Optional[float] = None
    info_bound_lin_direct_db: Optional[float] = None
    info_bound_exp_db: Optional[float] = None
    info_ep_mode: str = "full"
    support_bound_weighted_db: Optional[float] = None
    support_bound_bincount_db: Optional[float] = None
    unified_bound_db: Optional[float] = None
    bound_holds: Optional[bool] = None
    alpha: Optional[float] = None
    mi_nats: Optional[float] = None
    h_d_nats: Optional[float] = None
    floored: List[str] = Field(default_factory=list)
    seed: int
    # seed of this (noise, t60) scenario, derived from seed
    row_seed: Optional[int] = None
    config_hash: str
    error: Optional[str] = None


def stable_hash(payload) -> str:
    """16 hex chars of sha256 over canonical JSON."""
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]
