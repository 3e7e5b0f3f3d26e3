"""Deterministic synthetic dataset generator for runs, docs, and tests.

Prices follow seeded geometric random walks with a sector-level common factor,
so the same seed always yields byte-identical CSV files. News items are built
from the sentiment lexicon so the deterministic sentiment stub has signal to
find. The default shape is 20 symbols across 4 sectors over two calendar
years of weekdays (minus a few fixed holidays, so some weeks end on Thursday).
"""
from __future__ import annotations

import json
import os
from datetime import date as Date
from datetime import datetime, time, timedelta

import numpy as np

from .marketdata import AssetMeta, Bar, Dataset, NewsItem
from .risk import NEGATIVE_WORDS, POSITIVE_WORDS

SECTORS = ("TECH", "HEALTH", "ENERGY", "FINANCE")

_HOLIDAY_MONTH_DAYS = ((1, 1), (7, 4), (11, 26), (12, 25))


def synthetic_symbols(count: int) -> list[str]:
    return [f"SYM{i:02d}" for i in range(count)]


def synthetic_calendar(start: Date, end: Date) -> list[Date]:
    """Weekdays in [start, end] minus fixed holidays (some weeks lose Friday)."""
    days = []
    holidays = {Date(y, m, d)
                for y in range(start.year, end.year + 1)
                for m, d in _HOLIDAY_MONTH_DAYS}
    cur = start
    while cur <= end:
        if cur.weekday() < 5 and cur not in holidays:
            days.append(cur)
        cur += timedelta(days=1)
    return days


def make_bars(seed: int = 7, start: Date = Date(2021, 1, 4), end: Date = Date(2022, 12, 30),
              n_symbols: int = 20) -> list[Bar]:
    rng = np.random.default_rng(seed)
    symbols = synthetic_symbols(n_symbols)
    days = synthetic_calendar(start, end)
    n = len(days)
    sector_drift = rng.normal(0.0003, 0.0002, size=len(SECTORS))
    sector_paths = rng.normal(0.0, 0.008, size=(len(SECTORS), n))
    bars: list[Bar] = []
    for k, symbol in enumerate(symbols):
        sector_idx = k % len(SECTORS)
        base = float(rng.uniform(20.0, 300.0))
        idio = rng.normal(0.0, 0.012, size=n)
        steps = sector_drift[sector_idx] + 0.6 * sector_paths[sector_idx] + idio
        closes = base * np.exp(np.cumsum(steps))
        gaps = rng.normal(0.0, 0.003, size=n)
        spans = np.abs(rng.normal(0.0, 0.006, size=n)) + 1e-4
        volumes = rng.lognormal(mean=11.0, sigma=0.5, size=n).astype(int) + 1000
        prev_close = base
        for i, day in enumerate(days):
            close = float(closes[i])
            open_ = float(prev_close * (1.0 + gaps[i]))
            hi = max(open_, close) * float(1.0 + spans[i])
            lo = min(open_, close) * float(1.0 - spans[i])
            bars.append(Bar(symbol=symbol, date=day, open=open_, high=hi,
                            low=lo, close=close, volume=int(volumes[i])))
            prev_close = close
    return bars


def make_news(seed: int = 7, start: Date = Date(2021, 1, 4), end: Date = Date(2022, 12, 30),
              n_symbols: int = 20, per_week: int = 3) -> list[NewsItem]:
    rng = np.random.default_rng(seed + 1)
    symbols = synthetic_symbols(n_symbols)
    pos = sorted(POSITIVE_WORDS)
    neg = sorted(NEGATIVE_WORDS)
    days = synthetic_calendar(start, end)
    items: list[NewsItem] = []
    for day in days:
        if rng.random() > per_week / 5.0:
            continue
        symbol = symbols[int(rng.integers(0, len(symbols)))]
        if rng.random() < 0.5:
            word_a, word_b = pos[int(rng.integers(0, len(pos)))], pos[int(rng.integers(0, len(pos)))]
            headline = f"{symbol} posts {word_a} as outlook {word_b}"
        else:
            word_a, word_b = neg[int(rng.integers(0, len(neg)))], neg[int(rng.integers(0, len(neg)))]
            headline = f"{symbol} hit by {word_a} amid {word_b}"
        items.append(NewsItem(
            timestamp=datetime.combine(day, time(9, 30)),
            symbols=(symbol,) if rng.random() < 0.8 else (),
            headline=headline,
            body=f"Synthetic wire story about {symbol}.",
            source="synthetic-wire"))
    return items


def make_assets(n_symbols: int = 20) -> dict[str, AssetMeta]:
    return {s: AssetMeta(symbol=s, sector=SECTORS[i % len(SECTORS)])
            for i, s in enumerate(synthetic_symbols(n_symbols))}


def make_dataset(seed: int = 7, start: Date = Date(2021, 1, 4), end: Date = Date(2022, 12, 30),
                 n_symbols: int = 20) -> Dataset:
    return Dataset(
        make_bars(seed, start, end, n_symbols),
        news=make_news(seed, start, end, n_symbols),
        assets=make_assets(n_symbols),
    )


def write_dataset(data_dir: str, seed: int = 7, start: Date = Date(2021, 1, 4),
                  end: Date = Date(2022, 12, 30), n_symbols: int = 20) -> None:
    """Write the documented data directory layout for the synthetic dataset."""
    from .marketdata import save_bars

    bars_dir = os.path.join(data_dir, "bars")
    news_dir = os.path.join(data_dir, "news")
    os.makedirs(bars_dir, exist_ok=True)
    os.makedirs(news_dir, exist_ok=True)
    bars = make_bars(seed, start, end, n_symbols)
    by_symbol: dict[str, list[Bar]] = {}
    for bar in bars:
        by_symbol.setdefault(bar.symbol, []).append(bar)
    for symbol, sym_bars in sorted(by_symbol.items()):
        save_bars(sym_bars, os.path.join(bars_dir, f"{symbol}.csv"))
    with open(os.path.join(news_dir, "news.jsonl"), "w", encoding="utf-8") as handle:
        for item in make_news(seed, start, end, n_symbols):
            handle.write(json.dumps({
                "timestamp": item.timestamp.isoformat(),
                "symbols": list(item.symbols),
                "headline": item.headline,
                "body": item.body,
                "source": item.source,
            }, sort_keys=True) + "\n")
    with open(os.path.join(data_dir, "assets.csv"), "w", encoding="utf-8") as handle:
        handle.write("symbol,sector\n")
        for symbol, meta in sorted(make_assets(n_symbols).items()):
            handle.write(f"{symbol},{meta.sector}\n")
