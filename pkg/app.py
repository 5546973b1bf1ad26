import argparse
import os
import sys
from pathlib import Path

# Ensure project root is on path (for running directly via `python app.py`)
_project_root = os.path.dirname(os.path.abspath(__file__))
if _project_root not in sys.path:
    sys.path.insert(0, _project_root)

# Ensure stdout/stderr can handle Unicode on Windows terminals
if hasattr(sys.stdout, "reconfigure"):
    sys.stdout.reconfigure(encoding="utf-8")
if hasattr(sys.stderr, "reconfigure"):
    sys.stderr.reconfigure(encoding="utf-8")

from acoustics.rir_io import save_rir_json, save_rir_wav
from acoustics.room import beta_from_t60
from bounds.info_bound import estimate_densities
from bounds.support_bound import save_support_masks, spectral_support
from config.experiment_loader import load_experiment
from control.cancellers import build_canceller
from control.export import load_run, save_run
from control.pipeline import run_pipeline
from core.errors import AncBoundError, ArgumentError
from core.utils import log_error, log_step, render_frame, render_rows, render_summary, render_trend, setup_logging
from experiments.aggregate import ReportAggregator
from experiments.metrics import nmse_db
from experiments.report import build_manifest, read_report, write_report
from experiments.sweep import (
    bound_row,
    derive_seed,
    load_reference,
    run_sweep,
    scenario_paths,
    scenario_support,
)
from schemas import ExperimentConfig, RoomConfig

EXIT_OK, EXIT_FAILED, EXIT_ERROR = 0, 1, 2


def _load(args) -> ExperimentConfig:
    return load_experiment(args.config, args.set or [])


def _base_dir(args) -> Path | None:
    return Path(args.config).resolve().parent if args.config else None


def _pick(items: list, key: str | None, label: str, name=lambda item: item):
    if key is None:
        return 0, items[0]
    for i, item in enumerate(items):
        if name(item) == key or str(i) == key:
            return i, item
    raise ArgumentError(f"No {label} {key!r}; choose one of {[name(it) for it in items]}")


def _pick_t60(config: ExperimentConfig, t60: float | None) -> float:
    return config.t60_list[0] if t60 is None else t60


# =============================================================================
# Subcommands
# =============================================================================

def cmd_simulate_rir(args) -> int:
    config = _load(args)
    t60 = _pick_t60(config, args.t60)
    paths = scenario_paths(config, t60)
    out_dir = Path(args.out_dir)
    pos = config.positions
    primary_src = pos.noise_source if config.room.primary_source == "noise_source" else pos.reference_mic
    for name, ir, src in (("primary", paths.primary, primary_src), ("secondary", paths.secondary, pos.speaker)):
        room_cfg = RoomConfig(**config.room.model_dump(), source_pos_m=src, mic_pos_m=pos.error_mic, t60_s=t60)
        if args.format in ("json", "both"):
            save_rir_json(ir, out_dir / f"{name}.json", room_cfg)
        if args.format in ("wav", "both"):
            save_rir_wav(ir, out_dir / f"{name}.wav")

    beta = beta_from_t60(config.room.dims_m, t60, config.room.sound_speed_mps, config.room.reflection_model)
    log_step(f"RIRs for T60 = {t60} s written to {out_dir}", {
        "beta": f"{beta:.4f} ({config.room.reflection_model})",
        "primary": f"direct path @ {paths.primary.direct_path_index} samples, energy {paths.primary.energy:.4e}",
        "secondary": f"direct path @ {paths.secondary.direct_path_index} samples, energy {paths.secondary.energy:.4e}",
    })
    return EXIT_OK


def cmd_run_anc(args) -> int:
    config = _load(args)
    t60 = _pick_t60(config, args.t60)
    _, noise = _pick(config.noise_inputs, args.noise, "noise input", lambda n: n.id)
    _, spec = _pick(config.cancellers, args.canceller, "canceller", lambda c: c.label)

    row_seed = derive_seed(config.seed, noise.id, t60)
    x = load_reference(noise, config, row_seed, _base_dir(args))
    paths = scenario_paths(config, t60)
    if spec.kind == "external" and not Path(spec.path).is_absolute() and args.config:
        spec = spec.model_copy(update={"path": str(_base_dir(args) / spec.path)})
    run = run_pipeline(x, paths, build_canceller(spec, x.sample_rate_hz, len(x)))

    scenario = {"experiment": config.model_dump(mode="json"), "noise_id": noise.id, "t60_s": t60, "row_seed": row_seed}
    manifest = save_run(run, args.out_dir, scenario, config.seed, config.config_hash())
    log_step(f"Run [{run.canceller}] on {noise.id} @ T60 = {t60} s", {
        "nmse_db": f"{nmse_db(run.e, run.d).value:.2f}",
        "manifest": str(manifest),
    })
    return EXIT_OK


def cmd_bound(args) -> int:
    run, manifest = load_run(args.run_dir)
    scenario = manifest["config"]
    config = ExperimentConfig.model_validate(scenario["experiment"])
    t60, noise_id = scenario["t60_s"], scenario["noise_id"]
    paths = scenario_paths(config, t60)
    support = scenario_support(run.x, paths, config)
    row = bound_row(run, paths, support, config, noise_id, t60, manifest["config_hash"], scenario.get("row_seed"))
    render_rows([row], title=f"Bounds for {args.run_dir}")

    if args.export_dir:
        export = Path(args.export_dir)
        sup = config.support
        p_sup = spectral_support(paths.primary, sup.fft_size, sup.threshold_db, sup.reference)
        s_sup = spectral_support(paths.secondary, sup.fft_size, sup.threshold_db, sup.reference)
        save_support_masks(p_sup, s_sup, export / "support_masks.csv")
        dens = estimate_densities(run.d, run.y, config.kde)
        dens.p_d.to_csv(export / "density_d.csv")
        dens.p_y.to_csv(export / "density_y.csv")
        dens.p_dy.to_csv(export / "density_dy.csv")
        log_step(f"Support masks and densities written to {export}")
    if args.out:
        write_report([row], args.out, manifest=build_manifest(config))
    if row.bound_holds or args.no_assert_bound:
        return EXIT_OK
    return EXIT_FAILED


def cmd_sweep(args) -> int:
    config = _load(args)
    if args.workers:
        config = config.model_copy(update={"workers": args.workers})
    rows = run_sweep(config, base_dir=_base_dir(args), progress=not args.no_progress)

    out = Path(args.out)
    write_report(rows, out.with_suffix(".csv"), "csv")
    write_report(rows, out.with_suffix(".json"), "json", manifest=build_manifest(config))

    agg = ReportAggregator(rows)
    render_rows(rows)
    render_summary(agg.validity())
    if args.no_assert_bound:
        return EXIT_OK if agg.validity()["errors"] == 0 else EXIT_FAILED
    return EXIT_OK if agg.all_hold() else EXIT_FAILED


def cmd_report(args) -> int:
    rows = []
    for report in args.reports:
        report_rows, manifest = read_report(report)
        if manifest:
            log_step(f"Manifest of {report}", {k: manifest.get(k) for k in ("config_hash", "seed", "created_at")})
        rows.extend(report_rows)
    agg = ReportAggregator(rows)
    if len(args.reports) == 1:
        render_rows(rows)
    else:
        render_frame(agg.summary_frame(), title=f"Medians over {len(args.reports)} reports")
    render_summary(agg.validity())
    render_trend(agg.trend_checks())
    if args.csv:
        write_report(rows, args.csv, "csv")
    return EXIT_OK if agg.all_hold() else EXIT_FAILED


# =============================================================================
# CLI
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anc-bounds",
        description="Lower bounds on active noise cancellation: simulate, cancel, bound, sweep, report.",
    )
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p):
        p.add_argument("--config", help="experiment YAML (defaults apply when omitted)")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key, e.g. kde.bin_count=256")
        return p

    p = with_config(sub.add_parser("simulate-rir", help="generate primary and secondary RIRs"))
    p.add_argument("--t60", type=float, help="reverberation time (default: first of t60_list)")
    p.add_argument("--out-dir", default="outputs/rir")
    p.add_argument("--format", choices=["json", "wav", "both"], default="both")
    p.set_defaults(func=cmd_simulate_rir)

    p = with_config(sub.add_parser("run-anc", help="run one canceller on one noise input and export the signals"))
    p.add_argument("--t60", type=float)
    p.add_argument("--noise", help="noise input id or index (default: first)")
    p.add_argument("--canceller", help="canceller label (id, else kind) or index (default: first)")
    p.add_argument("--out-dir", default="outputs/run")
    p.set_defaults(func=cmd_run_anc)

    p = sub.add_parser("bound", help="compute NMSE and all bounds for an exported run")
    p.add_argument("--run-dir", required=True, help="directory written by run-anc")
    p.add_argument("--export-dir", help="also write support masks and KDE densities as CSV")
    p.add_argument("--out", help="write the row as a CSV or JSON report")
    p.add_argument("--no-assert-bound", action="store_true")
    p.set_defaults(func=cmd_bound)

    p = with_config(sub.add_parser("sweep", help="run the full noise x T60 x canceller sweep"))
    p.add_argument("--out", default="outputs/sweep.csv", help="report path; CSV and JSON are both written")
    p.add_argument("--workers", type=int, help="process-pool size (overrides the config)")
    p.add_argument("--no-assert-bound", action="store_true", help="exit 0 even if a bound is violated")
    p.add_argument("--no-progress", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="summarize one or more CSV or JSON reports (e.g. one per seed)")
    p.add_argument("reports", nargs="+")
    p.add_argument("--csv", help="re-emit the (concatenated) rows as CSV")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    try:
        return args.func(args)
    except AncBoundError as e:
        log_error(f"{args.command} failed", e)
        return EXIT_ERROR
    except OSError as e:
        log_error(f"{args.command}: I/O error", e)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
