"""Command-line entry points: run | sweep | analyze | witness | serve."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import analysis, config, storage, sweep
from .experiment import CHSH_SETTING_NAMES, accumulate_tables, run_experiment

EXIT_BAD_INPUT = 2


def _load(args) -> config.AppConfig:
    try:
        return config.load_config(args.config, seed_override=args.seed)
    except (FileNotFoundError, ValueError, KeyError) as exc:
        sys.exit(f"error: bad config {args.config}: {exc}")


def _write_or_print(text: str, out_dir: Path | None, filename: str) -> None:
    if out_dir is None:
        print(text, end="")
    else:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / filename).write_text(text, encoding="utf-8")
        print(f"wrote {out_dir / filename}")


def cmd_run(args) -> None:
    app_cfg = _load(args)
    if app_cfg.counts_path is not None:
        _analyze_counts(app_cfg.counts_path, args.out)
        return
    log, tables = run_experiment(app_cfg.run)
    estimate = analysis.chsh(tables) if set(CHSH_SETTING_NAMES) <= set(tables) else None
    out_dir = Path(args.out) if args.out else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        storage.write_trial_log(
            out_dir / "trials.jsonl",
            log,
            seed=app_cfg.run.seed,
            reveal_hidden=args.reveal_hidden,
        )
        print(f"wrote {out_dir / 'trials.jsonl'}")
        storage.write_counts(out_dir / "coincidences.counts", tables)
        print(f"wrote {out_dir / 'coincidences.counts'}")
    if estimate is not None:
        _write_or_print(storage.bell_report(estimate, tables), out_dir, "report.txt")


def _analyze_counts(path: Path, out: str | None) -> None:
    try:
        tables = storage.read_counts(path)
        estimate = analysis.chsh(tables)
    except (ValueError, KeyError) as exc:
        sys.exit(f"error: {exc}")
    _write_or_print(
        storage.bell_report(estimate, tables),
        Path(out) if out else None,
        "report.txt",
    )


def cmd_analyze(args) -> None:
    path = Path(args.input)
    if not path.is_file():
        sys.exit(f"error: no such file {path}")
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
    if first.startswith('{"format": "macrobell-trial-log"'):
        log = storage.read_trial_log(path)
        if len(log) == 0:
            sys.exit("error: insufficient data: trial log is empty")
        tables = accumulate_tables(log)
        try:
            estimate = analysis.chsh(tables)
        except (KeyError, analysis.InsufficientDataError) as exc:
            sys.exit(f"error: {exc}")
        _write_or_print(
            storage.bell_report(estimate, tables),
            Path(args.out) if args.out else None,
            "report.txt",
        )
    else:
        _analyze_counts(path, args.out)


def cmd_sweep(args) -> None:
    app_cfg = _load(args)
    if app_cfg.run is None:
        sys.exit("error: sweep needs a simulation config, not a reanalysis")
    thresholds = (
        [float(t) for t in args.thresholds]
        if args.thresholds
        else sweep.default_threshold_grid()
    )
    try:
        result = sweep.threshold_sweep(app_cfg.run, thresholds)
    except analysis.InsufficientDataError as exc:
        sys.exit(f"error: insufficient data: {exc}")
    rows = result.as_dicts()
    out_dir = Path(args.out) if args.out else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        storage.write_series(out_dir / "sweep.tsv", rows)
        print(f"wrote {out_dir / 'sweep.tsv'}")
    _write_or_print(storage.sweep_report(rows), out_dir, "sweep_report.txt")


def cmd_witness(args) -> None:
    estimates = []
    for path in args.scans:
        try:
            scan = storage.read_fringe_scan(path)
            estimates.append(
                analysis.visibility_fringe_fit(scan, basis_angle_deg=None)
            )
        except (ValueError, analysis.FringeFitError) as exc:
            sys.exit(f"error: {path}: {exc}")
    if len(estimates) == 2:
        result = analysis.witness_two_visibilities(*estimates)
    elif len(estimates) == 3:
        result = analysis.witness_three_visibilities(
            *[
                analysis.VisibilityEstimate(
                    basis=f"axis{i}", v=e.v, sigma_v=e.sigma_v, method=e.method
                )
                for i, e in enumerate(estimates)
            ]
        )
    else:
        sys.exit("error: witness needs two or three scan files")
    _write_or_print(
        storage.witness_report(result, estimates),
        Path(args.out) if args.out else None,
        "witness_report.txt",
    )


def cmd_serve(args) -> None:
    import uvicorn

    from .service import create_app

    app_cfg = _load(args)
    if app_cfg.run is None:
        sys.exit("error: serve needs a simulation config, not a reanalysis")
    static_dir = Path(args.ui) if args.ui else None
    app = create_app(app_cfg.run, pacing_ms=app_cfg.pacing_ms, static_dir=static_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="macrobell",
        description=(
            "Bell-test simulator for a classically amplified entangled photon: "
            "threshold detection, postselection, and entanglement witnesses."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_args(p):
        p.add_argument(
            "--config",
            required=True,
            help="config file path or bundled preset name "
            f"(presets: {', '.join(config.list_presets())})",
        )
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="output directory")

    p_run = sub.add_parser("run", help="run an experiment and analyze it")
    add_config_args(p_run)
    p_run.add_argument(
        "--reveal-hidden",
        action="store_true",
        help="include the hidden pulse angle in the trial log (white-box)",
    )
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="Bell parameter vs threshold")
    add_config_args(p_sweep)
    p_sweep.add_argument(
        "--thresholds", nargs="*", default=None, help="explicit threshold list"
    )
    p_sweep.set_defaults(func=cmd_sweep)

    p_analyze = sub.add_parser("analyze", help="analyze a trial log or counts file")
    p_analyze.add_argument("input", help="trial log (.jsonl) or counts file")
    p_analyze.add_argument("--out", default=None)
    p_analyze.set_defaults(func=cmd_analyze)

    p_witness = sub.add_parser(
        "witness", help="visibility witness from fringe-scan files"
    )
    p_witness.add_argument("scans", nargs="+", help="two or three scan files")
    p_witness.add_argument("--out", default=None)
    p_witness.set_defaults(func=cmd_witness)

    p_serve = sub.add_parser("serve", help="serve the human-observer session API")
    add_config_args(p_serve)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8123)
    p_serve.add_argument("--ui", default=None, help="static UI directory to mount")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> None:
    args = build_parser().parse_args(argv)
    args.func(args)


if __name__ == "__main__":
    main()
