"""Run export: one float32 WAV per signal plus a JSON manifest."""

import json
from datetime import datetime
from pathlib import Path

from control.pipeline import AncRun
from core.wav_io import read_wav, write_wav


def save_run(run: AncRun, out_dir: str | Path, config: dict, seed: int, config_hash: str) -> Path:
    """Write x, d, y, a, e WAVs and manifest.json into out_dir; returns the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    hashes = {}
    for name, wave in run.signals().items():
        write_wav(out_dir / f"{name}.wav", wave, fmt="float32")
        hashes[name] = wave.digest()
    manifest = {
        "canceller": run.canceller,
        "sample_rate_hz": run.x.sample_rate_hz,
        "n_samples": len(run.x),
        "seed": seed,
        "config_hash": config_hash,
        "config": config,
        "signal_sha256": hashes,
        "created_at": datetime.now().isoformat(),
    }
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2))
    return manifest_path


def load_run(out_dir: str | Path) -> tuple[AncRun, dict]:
    """Inverse of save_run (signals come back at float32 precision)."""
    out_dir = Path(out_dir)
    manifest_path = out_dir / "manifest.json"
    if not manifest_path.exists():
        raise FileNotFoundError(f"No run manifest in {out_dir}")
    manifest = json.loads(manifest_path.read_text())
    waves = {name: read_wav(out_dir / f"{name}.wav").waveform for name in ("x", "d", "y", "a", "e")}
    return AncRun(**waves, canceller=manifest["canceller"]), manifest
