"""ANC engine: cancellers and the feedforward signal chain."""

from control.cancellers import (
    Canceller,
    ExternalCanceller,
    FxlmsCanceller,
    NullCanceller,
    OracleCanceller,
    build_canceller,
)
from control.export import load_run, save_run
from control.fxlms import FxlmsConfig, FxlmsFilter, run_fxlms
from control.ingest import ingest_external_y
from control.pipeline import AncRun, run_pipeline

__all__ = [
    "AncRun",
    "Canceller",
    "ExternalCanceller",
    "FxlmsCanceller",
    "FxlmsConfig",
    "FxlmsFilter",
    "NullCanceller",
    "OracleCanceller",
    "build_canceller",
    "ingest_external_y",
    "load_run",
    "run_fxlms",
    "run_pipeline",
    "save_run",
]
