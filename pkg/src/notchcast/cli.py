"""Command-line interface.

Subcommands::

    synth     generate a synthetic rating-event CSV plus its ground truth
    train     build panels from events, fit the forecaster, write reports
    analyze   dip detection + lead-lag profile from an events CSV
    run-all   synth -> train -> analyze -> summary.txt in one output dir

Exit codes: 0 success, 2 configuration/usage error, 3 data error (bad or
unreadable inputs), 4 training diverged (non-finite loss). Output files
contain no timestamps or absolute paths, so a rerun with the same inputs
is byte-identical.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import analysis, training
from .backend import BACKEND
from .config import RunConfig, load_config
from .errors import ConfigError, DataError, NonFiniteLoss
from .panel import build_panels, read_events_csv, write_events_csv, write_panel_csv
from .preprocess import align_panels, build_supervised, dump_dataset_csv
from .synth import generate_panel


def _load(args) -> RunConfig:
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    return load_config(args.config, overrides)


def _ensure_out_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def _read_events(path: str, cfg: RunConfig):
    events = read_events_csv(path, allow_early_dates=cfg.allow_early_dates)
    return build_panels(events)


def _calendar(args):
    if getattr(args, "calendar", None):
        return analysis.read_event_calendar_csv(args.calendar)
    return analysis.DEFAULT_EVENT_CALENDAR


def cmd_synth(args) -> int:
    cfg = _load(args)
    out = _ensure_out_dir(args.out_dir)
    events, truth = generate_panel(cfg.synth_config())
    write_events_csv(events, os.path.join(out, "events.csv"))
    truth.write(os.path.join(out, "ground_truth.txt"))
    print(f"wrote {len(events)} events to {out}/events.csv (truth in ground_truth.txt)")
    return 0


def _train_into(cfg: RunConfig, events_path: str, out: str) -> dict:
    """Shared by train and run-all; returns the headline numbers."""
    us, intl = _read_events(events_path, cfg)
    write_panel_csv(us, os.path.join(out, "us_panel.csv"))
    write_panel_csv(intl, os.path.join(out, "intl_panel.csv"))

    train_set, test_set = build_supervised(
        us, intl,
        lookback=cfg.lookback,
        train_fraction=cfg.train_fraction,
        winsor_k=cfg.winsor_k,
    )
    if cfg.dump_dataset:
        dump_dataset_csv(train_set, os.path.join(out, "train_dataset.csv"))
        dump_dataset_csv(test_set, os.path.join(out, "test_dataset.csv"))

    params, curve = training.train(cfg.train_config(), train_set, test_set)
    report = training.evaluate(params, test_set, test_set.intl_stats)

    training.save_checkpoint(params, cfg.lookback, os.path.join(out, "model.txt"))
    curve.write_csv(os.path.join(out, "loss_curve.csv"))
    report.write_report(os.path.join(out, "eval.txt"))
    report.write_predictions_csv(os.path.join(out, "predictions.csv"))
    return {
        "mse_normalized": report.mse_normalized,
        "mse_notch": report.mse_notch,
        "baseline_mse": report.baseline_mse,
    }


def _analyze_into(cfg: RunConfig, events_path: str, out: str, calendar) -> dict:
    us, intl = _read_events(events_path, cfg)
    us_a, intl_a = align_panels(us, intl, min_months=cfg.max_lag + 3)
    dips = analysis.detect_dips(us_a, cfg.dip_window, cfg.dip_threshold)
    dips = analysis.match_events(dips, calendar, cfg.match_tolerance)
    lag = analysis.cross_correlation_lag(us_a.change, intl_a.change, cfg.max_lag)
    analysis.emit_trend_report(us_a, intl_a, dips, lag, out)
    return {
        "best_lag": lag.best_lag_months,
        "correlation_at_best": lag.correlation_at_best,
        "dips_detected": len(dips),
        "dips_matched": sum(1 for d in dips if d.matched_event is not None),
    }


def cmd_train(args) -> int:
    cfg = _load(args)
    out = _ensure_out_dir(args.out_dir)
    numbers = _train_into(cfg, args.events, out)
    print(f"backend={BACKEND}")
    for key, value in numbers.items():
        print(f"{key}={value!r}")
    return 0


def cmd_analyze(args) -> int:
    cfg = _load(args)
    out = _ensure_out_dir(args.out_dir)
    numbers = _analyze_into(cfg, args.events, out, _calendar(args))
    for key, value in numbers.items():
        print(f"{key}={value}")
    return 0


def cmd_run_all(args) -> int:
    cfg = _load(args)
    out = _ensure_out_dir(args.out_dir)

    events, truth = generate_panel(cfg.synth_config())
    events_path = os.path.join(out, "events.csv")
    write_events_csv(events, events_path)
    truth.write(os.path.join(out, "ground_truth.txt"))

    numbers = _train_into(cfg, events_path, out)
    numbers.update(_analyze_into(cfg, events_path, out, _calendar(args)))

    with open(os.path.join(out, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write(f"mse_normalized={numbers['mse_normalized']!r}\n")
        fh.write(f"mse_notch={numbers['mse_notch']!r}\n")
        fh.write(f"baseline_mse={numbers['baseline_mse']!r}\n")
        fh.write(f"best_lag={numbers['best_lag']}\n")
        fh.write(f"correlation_at_best={numbers['correlation_at_best']!r}\n")
        fh.write(f"dips_detected={numbers['dips_detected']}\n")
        fh.write(f"dips_matched={numbers['dips_matched']}\n")

    print(f"backend={BACKEND}")
    for key, value in numbers.items():
        rendered = repr(value) if isinstance(value, float) else value
        print(f"{key}={rendered}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="notchcast",
        description="Credit-rating panel forecasting and lead-lag analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, events: bool, seed: bool, calendar: bool):
        p.add_argument("--config", default=None, help="key=value config file")
        p.add_argument("--out-dir", default="out", help="output directory")
        if events:
            p.add_argument("--events", required=True,
                           help="rating-event CSV (entity_id,region,date,rating)")
        if seed:
            p.add_argument("--seed", type=int, default=None,
                           help="override the config seed")
        if calendar:
            p.add_argument("--calendar", default=None,
                           help="event calendar CSV (name,anchor_month[,timing])")

    p = sub.add_parser("synth", help="generate synthetic rating events")
    common(p, events=False, seed=True, calendar=False)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train the forecaster on an events CSV")
    common(p, events=True, seed=True, calendar=False)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("analyze", help="dip detection and lead-lag analysis")
    common(p, events=True, seed=False, calendar=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("run-all", help="synth + train + analyze + summary")
    common(p, events=False, seed=True, calendar=True)
    p.set_defaults(func=cmd_run_all)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NonFiniteLoss as exc:
        print(f"training diverged: loss became non-finite at epoch {exc.epoch}",
              file=sys.stderr)
        return 4


def entry_point() -> None:
    raise SystemExit(main(sys.argv[1:]))
