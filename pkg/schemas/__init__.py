"""
Configuration and report schemas.

Everything that is read from or written to a file is validated through these models.
"""

from schemas.anc_schemas import (
    BoundRow,
    CancellerSpec,
    ExperimentConfig,
    FxlmsParams,
    KdeConfig,
    NoiseInput,
    Positions,
    RoomConfig,
    RoomGeometry,
    SignalConfig,
    SupportConfig,
    stable_hash,
)

__all__ = [
    "BoundRow",
    "CancellerSpec",
    "ExperimentConfig",
    "FxlmsParams",
    "KdeConfig",
    "NoiseInput",
    "Positions",
    "RoomConfig",
    "RoomGeometry",
    "SignalConfig",
    "SupportConfig",
    "stable_hash",
]
