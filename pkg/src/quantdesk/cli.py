"""Command-line entry point: validate, run, report, synth.

Exit codes: 0 success, 1 engine error, 2 validation failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import date as Date

from .agents.backends import HttpChatBackend, ScriptedBackend
from .agents.profiles import load_shipped_profiles
from .config import RunConfig, load_config
from .errors import DataError, QuantDeskError
from .marketdata import load_assets, load_bars, load_dataset, load_news
from .meetings import TradingDesk
from .metrics import MetricsReport
from .report import (
    render_figures,
    render_metrics_table,
    write_comparison_csv,
    write_cumulative_returns,
    write_run_artifacts,
)
from .strategy import generate_pool
from .synth import write_dataset

EXIT_OK = 0
EXIT_ENGINE = 1
EXIT_VALIDATION = 2


def cmd_validate(args) -> int:
    data_dir = args.data_dir
    if not os.path.isdir(data_dir):
        print(f"error: {data_dir} is not a directory", file=sys.stderr)
        return EXIT_VALIDATION
    violations: list[str] = []
    checked = 0
    bars_dir = os.path.join(data_dir, "bars")
    if not os.path.isdir(bars_dir):
        violations.append(f"{bars_dir}: missing bars directory")
    else:
        for name in sorted(os.listdir(bars_dir)):
            if not name.endswith(".csv"):
                continue
            checked += 1
            try:
                load_bars(os.path.join(bars_dir, name))
            except DataError as exc:
                violations.append(str(exc))
    news_dir = os.path.join(data_dir, "news")
    if os.path.isdir(news_dir):
        for name in sorted(os.listdir(news_dir)):
            if not name.endswith(".jsonl"):
                continue
            checked += 1
            try:
                load_news(os.path.join(news_dir, name))
            except DataError as exc:
                violations.append(str(exc))
    assets_path = os.path.join(data_dir, "assets.csv")
    if not os.path.exists(assets_path):
        violations.append(f"{assets_path}: missing assets.csv sector map")
    else:
        checked += 1
        try:
            assets = load_assets(assets_path)
            if os.path.isdir(bars_dir):
                for name in sorted(os.listdir(bars_dir)):
                    if name.endswith(".csv"):
                        symbol = name[:-4]
                        if symbol not in assets:
                            violations.append(f"{assets_path}: no sector for {symbol}")
        except DataError as exc:
            violations.append(str(exc))
    for line in violations:
        print(f"violation: {line}")
    print(f"checked {checked} files, {len(violations)} violations")
    return EXIT_VALIDATION if violations else EXIT_OK


def _build_backend(config: RunConfig):
    if config.backend_kind == "scripted":
        return ScriptedBackend(seed=config.seed)
    return HttpChatBackend(endpoint=config.backend_endpoint, model=config.backend_model,
                           temperature=config.backend_temperature)


def cmd_run(args) -> int:
    overrides = {}
    if args.seed is not None:
        overrides["run.seed"] = args.seed
    if args.out is not None:
        overrides["output.dir"] = args.out
    if args.backend is not None:
        overrides["backend.kind"] = args.backend
    try:
        config = load_config(args.config, overrides)
    except (QuantDeskError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        dataset = load_dataset(config.data_dir)
        pool = generate_pool(config.pool)
        profiles = load_shipped_profiles()
        backend = _build_backend(config)
        desk = TradingDesk(dataset, pool, profiles, backend, config.desk)
        result = desk.run(config.start, config.end)
    except QuantDeskError as exc:
        os.makedirs(config.out_dir, exist_ok=True)
        manifest = {"config_hash": config.config_hash(), "seed": config.seed,
                    "status": "failed", "failure_point": str(exc)}
        with open(os.path.join(config.out_dir, "manifest.json"), "w", encoding="utf-8") as handle:
            json.dump(manifest, handle, indent=2, sort_keys=True)
            handle.write("\n")
        print(f"engine error: {exc}", file=sys.stderr)
        return EXIT_ENGINE
    write_run_artifacts(desk, result, config.out_dir, config.config_hash(), config.seed)
    print(render_metrics_table(result.metrics, title=f"run -> {config.out_dir}"))
    print(f"meetings: {result.counts}")
    return EXIT_OK


def cmd_report(args) -> int:
    run_dirs = [args.run_dir] + list(args.compare or [])
    for run_dir in run_dirs:
        if not os.path.isfile(os.path.join(run_dir, "net_value.csv")):
            print(f"error: {run_dir}/net_value.csv not found", file=sys.stderr)
            return EXIT_ENGINE
    metrics_path = os.path.join(args.run_dir, "metrics.json")
    if not os.path.isfile(metrics_path):
        print(f"error: {metrics_path} not found", file=sys.stderr)
        return EXIT_ENGINE
    with open(metrics_path, encoding="utf-8") as handle:
        metrics = MetricsReport.from_json(handle.read())
    print(render_metrics_table(metrics, title=args.run_dir))
    out_dir = args.out or args.run_dir
    os.makedirs(out_dir, exist_ok=True)
    csv_path = write_cumulative_returns(args.run_dir,
                                        os.path.join(out_dir, "cumulative_returns.csv"))
    written = [csv_path]
    if args.compare:
        written.append(write_comparison_csv(run_dirs, os.path.join(out_dir, "comparison.csv")))
    written.extend(render_figures(run_dirs, out_dir))
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_synth(args) -> int:
    write_dataset(args.data_dir, seed=args.seed,
                  start=Date.fromisoformat(args.start), end=Date.fromisoformat(args.end),
                  n_symbols=args.symbols)
    print(f"wrote synthetic dataset to {args.data_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quantdesk",
                                     description="walk-forward multi-agent trading desk")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a data directory against the schemas")
    p_validate.add_argument("data_dir")
    p_validate.set_defaults(fn=cmd_validate)

    p_run = sub.add_parser("run", help="execute a walk-forward run from a config file")
    p_run.add_argument("config")
    p_run.add_argument("--seed", type=int, default=None, help="override run.seed")
    p_run.add_argument("--out", default=None, help="override output.dir")
    p_run.add_argument("--backend", choices=("scripted", "http"), default=None,
                       help="override backend.kind")
    p_run.add_argument("--jobs", type=int, default=1,
                       help="parallel strategy backtests inside SDM (1 = serial)")
    p_run.set_defaults(fn=cmd_run)

    p_report = sub.add_parser("report", help="print the metric table and emit plot data")
    p_report.add_argument("run_dir")
    p_report.add_argument("--compare", nargs="*", default=None,
                          help="additional run directories to merge into the comparison")
    p_report.add_argument("--out", default=None, help="directory for report outputs")
    p_report.set_defaults(fn=cmd_report)

    p_synth = sub.add_parser("synth", help="write the bundled synthetic dataset")
    p_synth.add_argument("data_dir")
    p_synth.add_argument("--seed", type=int, default=7)
    p_synth.add_argument("--start", default="2021-01-04")
    p_synth.add_argument("--end", default="2022-12-30")
    p_synth.add_argument("--symbols", type=int, default=20)
    p_synth.set_defaults(fn=cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except QuantDeskError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENGINE


if __name__ == "__main__":
    sys.exit(main())
