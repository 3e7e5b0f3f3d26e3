"""Run artifact writing, the nine-metric table, and report rendering.

`write_run_artifacts` emits the full deterministic artifact set of a run
(net-value/weights/ledger CSVs, per-meeting JSON, metrics JSON, memory JSONL,
and a manifest carrying the config hash and seed -- no timestamps, so repeated
runs are byte-identical). The report path additionally renders matplotlib
figures next to the delimited output.
"""
from __future__ import annotations

import csv
import json
import os

from . import __version__
from .errors import DataError
from .meetings import RunResult, TradingDesk
from .metrics import METRIC_KEYS, MetricsReport
from .portfolio import CASH, export_ledger_csv


def write_run_artifacts(desk: TradingDesk, result: RunResult, out_dir: str,
                        config_hash: str, seed: int,
                        status: str = "completed", failure_point: str | None = None) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "net_value.csv"), "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["date", "net_value"])
        for day, nv in zip(result.dates, result.net_values):
            writer.writerow([day.isoformat(), repr(nv)])
    with open(os.path.join(out_dir, "weights.csv"), "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["date", "asset", "weight"])
        for day, weights in zip(result.dates, result.weights):
            for asset in sorted(weights):
                if weights[asset] > 0 or asset == CASH:
                    writer.writerow([day.isoformat(), asset, repr(weights[asset])])
    export_ledger_csv(desk.account, os.path.join(out_dir, "ledger.csv"))
    meetings_dir = os.path.join(out_dir, "meetings")
    os.makedirs(meetings_dir, exist_ok=True)
    for record in result.meetings:
        name = f"{record.date.isoformat()}-{record.kind}.json"
        with open(os.path.join(meetings_dir, name), "w", encoding="utf-8") as handle:
            handle.write(record.to_json() + "\n")
    with open(os.path.join(out_dir, "metrics.json"), "w", encoding="utf-8") as handle:
        handle.write(result.metrics.to_json() + "\n")
    desk.memory.save_jsonl(os.path.join(out_dir, "memory.jsonl"))
    manifest = {
        "config_hash": config_hash,
        "seed": seed,
        "version": __version__,
        "status": status,
        "failure_point": failure_point,
        "counts": result.counts,
        "fills": len(result.fills),
        "audit_events": len(result.audit),
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")
    with open(os.path.join(out_dir, "audit.jsonl"), "w", encoding="utf-8") as handle:
        for event in result.audit:
            handle.write(json.dumps(event, sort_keys=True) + "\n")


def render_metrics_table(metrics: MetricsReport, title: str = "run") -> str:
    """Fixed-width table with exactly the nine metric columns."""
    def fmt(value):
        return "n/a" if value is None else f"{value:.4f}"

    header = " | ".join(f"{k:>8}" for k in METRIC_KEYS)
    row = " | ".join(f"{fmt(getattr(metrics, k)):>8}" for k in METRIC_KEYS)
    rule = "-" * len(header)
    return f"{title}\n{header}\n{rule}\n{row}"


def read_net_value_csv(path: str) -> tuple[list[str], list[float]]:
    dates: list[str] = []
    values: list[float] = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["date", "net_value"]:
            raise DataError(f"{path}: unexpected header {header}")
        for row in reader:
            dates.append(row[0])
            values.append(float(row[1]))
    return dates, values


def write_cumulative_returns(run_dir: str, out_path: str | None = None) -> str:
    """Emit cumulative_returns.csv (date, net value, return index in percent)."""
    dates, values = read_net_value_csv(os.path.join(run_dir, "net_value.csv"))
    if not values:
        raise DataError(f"{run_dir}: empty net value series")
    out_path = out_path or os.path.join(run_dir, "cumulative_returns.csv")
    base = values[0]
    with open(out_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["date", "net_value", "return_index"])
        for day, nv in zip(dates, values):
            writer.writerow([day, repr(nv), repr((nv / base - 1.0) * 100.0)])
    return out_path


def write_comparison_csv(run_dirs: list[str], out_path: str) -> str:
    """Long-format merge of several runs, keyed by a run-id column."""
    with open(out_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["run_id", "date", "net_value", "return_index"])
        for run_dir in run_dirs:
            run_id = os.path.basename(os.path.normpath(run_dir))
            dates, values = read_net_value_csv(os.path.join(run_dir, "net_value.csv"))
            if not values:
                raise DataError(f"{run_dir}: empty net value series")
            base = values[0]
            for day, nv in zip(dates, values):
                writer.writerow([run_id, day, repr(nv), repr((nv / base - 1.0) * 100.0)])
    return out_path


def render_figures(run_dirs: list[str], out_dir: str) -> list[str]:
    """Render cumulative-return and drawdown figures to PNG files.

    matplotlib stays an import of the report path only; the engine itself
    never draws.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(out_dir, exist_ok=True)
    written: list[str] = []
    fig, ax = plt.subplots(figsize=(9, 5))
    for run_dir in run_dirs:
        run_id = os.path.basename(os.path.normpath(run_dir))
        dates, values = read_net_value_csv(os.path.join(run_dir, "net_value.csv"))
        base = values[0]
        series = [(v / base - 1.0) * 100.0 for v in values]
        ax.plot(range(len(series)), series, label=run_id, linewidth=1.2)
    ax.set_xlabel("trading day")
    ax.set_ylabel("cumulative return (%)")
    ax.set_title("Cumulative returns")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    path = os.path.join(out_dir, "cumulative_returns.png")
    fig.savefig(path, dpi=120, metadata={"Software": "quantdesk"})
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(9, 4))
    for run_dir in run_dirs:
        run_id = os.path.basename(os.path.normpath(run_dir))
        _, values = read_net_value_csv(os.path.join(run_dir, "net_value.csv"))
        peak = values[0]
        drawdown = []
        for v in values:
            peak = max(peak, v)
            drawdown.append((v - peak) / peak * 100.0)
        ax.plot(range(len(drawdown)), drawdown, label=run_id, linewidth=1.2)
    ax.set_xlabel("trading day")
    ax.set_ylabel("drawdown (%)")
    ax.set_title("Drawdown")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    path = os.path.join(out_dir, "drawdown.png")
    fig.savefig(path, dpi=120, metadata={"Software": "quantdesk"})
    plt.close(fig)
    written.append(path)
    return written
