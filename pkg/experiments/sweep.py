"""
Experiment Sweep Runner

For every (noise input, T60) scenario:
    simulate P and S -> S_xx of the reference -> support bound (shared by all cancellers)
and for every canceller of the scenario:
    run the ANC chain -> NMSE, info bounds, unified bound, bound_holds

Row order is noise -> T60 -> canceller regardless of the worker count. Row-level
failures (unreadable input, diverged filter, rejected external y) are recorded on the
row and the sweep moves on; an infeasible room aborts the whole sweep before any row runs.
"""

import hashlib
import logging
from dataclasses import dataclass
from multiprocessing import Pool
from pathlib import Path

from tqdm import tqdm

from acoustics.room import PathPair, simulate_paths
from bounds.info_bound import info_bound_db, mutual_information
from bounds.support_bound import SupportBoundResult, support_bound_db
from control.cancellers import build_canceller
from control.pipeline import AncRun, run_pipeline
from core.dsp import welch_psd
from core.errors import AncBoundError
from core.signals import Waveform
from experiments.metrics import nmse_db, unified_bound_db
from experiments.noise import load_noise_wav, synth_noise
from schemas import BoundRow, CancellerSpec, ExperimentConfig, NoiseInput

logger = logging.getLogger(__name__)


def derive_seed(seed: int, noise_id: str, t60_s: float) -> int:
    """Per-scenario seed: first 8 bytes of sha256("seed:noise_id:t60")."""
    digest = hashlib.sha256(f"{seed}:{noise_id}:{t60_s}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class Scenario:
    noise: NoiseInput
    t60_s: float
    paths: PathPair
    row_seed: int


def scenario_paths(config: ExperimentConfig, t60_s: float) -> PathPair:
    pos = config.positions
    return simulate_paths(config.room, pos.reference_mic, pos.error_mic, pos.speaker, t60_s, pos.noise_source)


def _resolve(path: str, base_dir: Path | None) -> Path:
    p = Path(path)
    return p if p.is_absolute() or base_dir is None else base_dir / p


def load_reference(noise: NoiseInput, config: ExperimentConfig, row_seed: int, base_dir: Path | None = None) -> Waveform:
    sig = config.signal
    if noise.kind is not None:
        return synth_noise(noise.kind, sig.target_seconds, sig.target_rate_hz, row_seed)
    return load_noise_wav(_resolve(noise.path, base_dir), sig.target_rate_hz, sig.target_seconds)


def scenario_support(x: Waveform, paths: PathPair, config: ExperimentConfig) -> SupportBoundResult:
    sup = config.support
    return support_bound_db(paths, welch_psd(x), sup.fft_size, sup.threshold_db, sup.reference)


def bound_row(
    run: AncRun,
    paths: PathPair,
    support: SupportBoundResult,
    config: ExperimentConfig,
    noise_id: str,
    t60_s: float,
    config_hash: str,
    row_seed: int | None = None,
) -> BoundRow:
    """NMSE of one run against every bound variant; the configured variants form the unified bound."""
    nmse = nmse_db(run.e, run.d)
    info = mutual_information(run.d, run.y, config.kde)
    lin = {mode: info_bound_db(info, paths.primary, "linear", mode) for mode in ("full", "direct")}
    expo = info_bound_db(info, paths.primary, "exponential")
    info_sel = lin[config.ep_mode]
    support_sel = support.bound(config.support_variant)
    unified = unified_bound_db(info_sel.value, support_sel.value)

    named = {
        "nmse_db": nmse,
        "info_bound_lin_full_db": lin["full"],
        "info_bound_lin_direct_db": lin["direct"],
        "info_bound_exp_db": expo,
        "support_bound_weighted_db": support.bound_db_weighted,
        "support_bound_bincount_db": support.bound_db_bincount,
    }
    holds = nmse.value >= unified
    if not holds:
        logger.error(
            f"Bound violated for {noise_id} @ T60={t60_s} [{run.canceller}]: "
            f"NMSE {nmse.value:.2f} dB < unified {unified:.2f} dB"
        )
    return BoundRow(
        noise_id=noise_id,
        t60_s=t60_s,
        canceller=run.canceller,
        nmse_db=nmse.value,
        info_bound_lin_db=info_sel.value,
        info_bound_lin_full_db=lin["full"].value,
        info_bound_lin_direct_db=lin["direct"].value,
        info_bound_exp_db=expo.value,
        info_ep_mode=config.ep_mode,
        support_bound_weighted_db=support.bound_db_weighted.value,
        support_bound_bincount_db=support.bound_db_bincount.value,
        unified_bound_db=unified,
        bound_holds=holds,
        alpha=info.alpha,
        mi_nats=info.mi,
        h_d_nats=info.h_d,
        floored=[name for name, value in named.items() if value.floored],
        seed=config.seed,
        row_seed=row_seed,
        config_hash=config_hash,
    )


def _with_resolved_path(spec: CancellerSpec, base_dir: Path | None) -> CancellerSpec:
    if spec.kind != "external":
        return spec
    return spec.model_copy(update={"path": str(_resolve(spec.path, base_dir))})


def evaluate_scenario(
    config: ExperimentConfig,
    scenario: Scenario,
    config_hash: str,
    base_dir: Path | None = None,
) -> list[BoundRow]:
    noise, t60 = scenario.noise, scenario.t60_s

    def failed(spec: CancellerSpec, err: Exception) -> BoundRow:
        logger.error(f"Row {noise.id} @ T60={t60} [{spec.label}] failed: {err}")
        return BoundRow(
            noise_id=noise.id,
            t60_s=t60,
            canceller=spec.label,
            info_ep_mode=config.ep_mode,
            seed=config.seed,
            row_seed=scenario.row_seed,
            config_hash=config_hash,
            error=f"{type(err).__name__}: {err}",
        )

    try:
        x = load_reference(noise, config, scenario.row_seed, base_dir)
        support = scenario_support(x, scenario.paths, config)
    except (AncBoundError, OSError) as e:
        return [failed(spec, e) for spec in config.cancellers]

    rows = []
    for spec in config.cancellers:
        try:
            canceller = build_canceller(_with_resolved_path(spec, base_dir), x.sample_rate_hz, len(x))
            run = run_pipeline(x, scenario.paths, canceller)
            rows.append(bound_row(run, scenario.paths, support, config, noise.id, t60, config_hash, scenario.row_seed))
        except (AncBoundError, OSError) as e:
            rows.append(failed(spec, e))
    return rows


def _evaluate_task(task: tuple) -> list[BoundRow]:
    return evaluate_scenario(*task)


def run_sweep(config: ExperimentConfig, base_dir: str | Path | None = None, progress: bool = True) -> list[BoundRow]:
    """
    Run every (noise, T60, canceller) row of the experiment.

    base_dir resolves relative WAV paths (normally the directory of the config file).
    Raises InfeasibleRoomError (or ArgumentError for positions outside the room) before
    any row runs.
    """
    base_dir = Path(base_dir) if base_dir is not None else None
    config_hash = config.config_hash()
    paths_by_t60 = {t60: scenario_paths(config, t60) for t60 in config.t60_list}

    tasks = [
        (config, Scenario(noise, t60, paths_by_t60[t60], derive_seed(config.seed, noise.id, t60)), config_hash, base_dir)
        for noise in config.noise_inputs
        for t60 in config.t60_list
    ]
    logger.info(
        f"Sweep {config_hash}: {len(config.noise_inputs)} noises x {len(config.t60_list)} T60 x "
        f"{len(config.cancellers)} cancellers on {config.workers} worker(s)"
    )

    bar = dict(total=len(tasks), desc="sweep", unit="scenario", disable=not progress)
    if config.workers > 1:
        with Pool(config.workers) as pool:
            chunks = list(tqdm(pool.imap(_evaluate_task, tasks), **bar))
    else:
        chunks = [_evaluate_task(task) for task in tqdm(tasks, **bar)]

    rows = [row for chunk in chunks for row in chunk]
    n_err = sum(1 for r in rows if r.error)
    n_viol = sum(1 for r in rows if r.bound_holds is False)
    logger.info(f"Sweep done: {len(rows)} rows, {n_err} errors, {n_viol} bound violations")
    return rows
