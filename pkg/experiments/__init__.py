"""Experiment orchestration: noise inputs, metrics, sweeps and reports."""

from experiments.aggregate import ReportAggregator, TrendCheck
from experiments.metrics import nmse_db, tail_nmse_db, unified_bound_db
from experiments.noise import NOISE_KINDS, synth_noise
from experiments.report import CSV_COLUMNS, read_report, write_report
from experiments.sweep import derive_seed, run_sweep

__all__ = [
    "CSV_COLUMNS",
    "NOISE_KINDS",
    "ReportAggregator",
    "TrendCheck",
    "derive_seed",
    "nmse_db",
    "read_report",
    "run_sweep",
    "synth_noise",
    "tail_nmse_db",
    "unified_bound_db",
]
