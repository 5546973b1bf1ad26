"""RIR export/import: JSON tap arrays with metadata, or float32 WAV."""

import json
from pathlib import Path

from core.signals import ImpulseResponse, Waveform
from core.wav_io import read_wav, write_wav
from schemas import RoomConfig


def save_rir_json(ir: ImpulseResponse, path: str | Path, config: RoomConfig | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "sample_rate_hz": ir.sample_rate_hz,
        "n_taps": len(ir),
        "taps": [float(v) for v in ir.taps],
        "config": config.model_dump(mode="json") if config else None,
        "config_hash": config.config_hash() if config else None,
    }
    path.write_text(json.dumps(payload, indent=2))
    return path


def load_rir_json(path: str | Path) -> ImpulseResponse:
    payload = json.loads(Path(path).read_text())
    return ImpulseResponse(payload["taps"], payload["sample_rate_hz"])


def save_rir_wav(ir: ImpulseResponse, path: str | Path) -> Path:
    return write_wav(path, Waveform(ir.taps, ir.sample_rate_hz), fmt="float32")


def load_rir_wav(path: str | Path) -> ImpulseResponse:
    wav = read_wav(path).waveform
    return ImpulseResponse(wav.samples, wav.sample_rate_hz)
