"""
Report writing and reading.

CSV carries the plot-ready columns only (no timestamps, so identical configs give
byte-identical files); JSON mirrors every row field and nests the run manifest.
"""

import json
import logging
from datetime import datetime
from pathlib import Path

import pandas as pd

from core.errors import ArgumentError
from schemas import BoundRow, ExperimentConfig

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "noise_id",
    "t60_s",
    "canceller",
    "nmse_db",
    "info_bound_lin_db",
    "info_bound_exp_db",
    "info_ep_mode",
    "support_bound_weighted_db",
    "support_bound_bincount_db",
    "unified_bound_db",
    "bound_holds",
    "seed",
    "config_hash",
]

_FLOAT_COLUMNS = {
    "t60_s", "nmse_db", "info_bound_lin_db", "info_bound_exp_db",
    "support_bound_weighted_db", "support_bound_bincount_db", "unified_bound_db",
}


def _bool_literal(value) -> str:
    if value is None:
        return ""
    return "true" if value else "false"


def rows_frame(rows: list[BoundRow]) -> pd.DataFrame:
    records = [{col: getattr(row, col) for col in CSV_COLUMNS} for row in rows]
    df = pd.DataFrame(records, columns=CSV_COLUMNS)
    df["bound_holds"] = [_bool_literal(r.bound_holds) for r in rows]
    return df


def build_manifest(config: ExperimentConfig) -> dict:
    return {
        "config": config.model_dump(mode="json"),
        "config_hash": config.config_hash(),
        "seed": config.seed,
        "created_at": datetime.now().isoformat(),
    }


def write_report(rows: list[BoundRow], path: str | Path, fmt: str | None = None, manifest: dict | None = None) -> Path:
    """Write rows as CSV or JSON (format taken from the suffix when not given)."""
    path = Path(path)
    fmt = fmt or path.suffix.lstrip(".").lower()
    if fmt not in ("csv", "json"):
        raise ArgumentError(f"Unsupported report format {fmt!r}; expected 'csv' or 'json'")
    path.parent.mkdir(parents=True, exist_ok=True)

    if fmt == "csv":
        # repr-precision floats so a parse gives the same values back
        rows_frame(rows).to_csv(path, index=False, lineterminator="\n")
    else:
        payload = {
            "manifest": manifest or {},
            "columns": CSV_COLUMNS,
            "rows": [row.model_dump(mode="json") for row in rows],
        }
        path.write_text(json.dumps(payload, indent=2))
    logger.info(f"Wrote {len(rows)} rows to {path}")
    return path


def _parse_csv_cell(col: str, raw: str):
    if raw == "":
        return None
    if col in _FLOAT_COLUMNS:
        return float(raw)
    if col == "seed":
        return int(raw)
    if col == "bound_holds":
        return raw == "true"
    return raw


def read_report(path: str | Path) -> tuple[list[BoundRow], dict]:
    """Rows and manifest of a CSV or JSON report (CSV reports have an empty manifest)."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        payload = json.loads(path.read_text())
        rows = [BoundRow.model_validate(r) for r in payload.get("rows", [])]
        return rows, payload.get("manifest", {})

    df = pd.read_csv(path, dtype=str, keep_default_na=False)
    missing = [c for c in CSV_COLUMNS if c not in df.columns]
    if missing:
        raise ArgumentError(f"{path} is not a bound report; missing columns {missing}")
    rows = []
    for record in df.to_dict(orient="records"):
        values = {col: _parse_csv_cell(col, record[col]) for col in CSV_COLUMNS}
        values["info_ep_mode"] = values["info_ep_mode"] or "full"
        rows.append(BoundRow(**values))
    return rows, {}
