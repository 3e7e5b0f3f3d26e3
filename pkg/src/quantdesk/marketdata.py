"""Market data ingestion, trading calendar, and time-bounded views.

Bars come from CSV files (``symbol,date,open,high,low,close,volume[,adjusted_close]``,
ISO-8601 dates), news from JSONL, sector metadata from ``assets.csv``. A loaded
:class:`Dataset` is immutable; :class:`MarketView` exposes it up to a cursor date
and raises :class:`~quantdesk.errors.LookaheadError` on any access past it.
"""
from __future__ import annotations

import csv
import json
import os
from bisect import bisect_right
from dataclasses import dataclass, field
from datetime import date as Date
from datetime import datetime

import numpy as np

from .errors import (
    DuplicateBarError,
    EmptyDatasetError,
    LookaheadError,
    ParseError,
    ValidationError,
)

BAR_COLUMNS = ("symbol", "date", "open", "high", "low", "close", "volume")
OPTIONAL_BAR_COLUMNS = ("adjusted_close",)


@dataclass(frozen=True)
class Bar:
    """One asset-day of OHLCV data."""

    symbol: str
    date: Date
    open: float
    high: float
    low: float
    close: float
    volume: int
    adjusted_close: float | None = None

    def validate(self) -> None:
        prices = (self.open, self.high, self.low, self.close)
        if any(p <= 0 for p in prices):
            raise ValidationError(f"{self.symbol} {self.date}: non-positive price")
        if self.low > self.high:
            raise ValidationError(f"{self.symbol} {self.date}: low > high")
        if self.low > min(self.open, self.close):
            raise ValidationError(f"{self.symbol} {self.date}: low above open/close")
        if self.high < max(self.open, self.close):
            raise ValidationError(f"{self.symbol} {self.date}: high below open/close")
        if self.volume < 0:
            raise ValidationError(f"{self.symbol} {self.date}: negative volume")


@dataclass(frozen=True)
class NewsItem:
    """A dated headline; empty ``symbols`` means market-wide."""

    timestamp: datetime
    symbols: tuple[str, ...]
    headline: str
    body: str = ""
    source: str = ""

    def validate(self) -> None:
        if not self.headline.strip():
            raise ValidationError("news item with empty headline")

    def mentions(self, symbols: list[str] | tuple[str, ...]) -> bool:
        if not self.symbols:
            return True
        return any(s in self.symbols for s in symbols)


@dataclass(frozen=True)
class AssetMeta:
    """Sector label and rolling average daily volume for one symbol."""

    symbol: str
    sector: str
    average_daily_volume: float = 0.0


def _parse_date(text: str, where: str) -> Date:
    try:
        return Date.fromisoformat(text.strip())
    except ValueError as exc:
        raise ParseError(f"{where}: bad date {text!r}") from exc


def _parse_float(text: str, where: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ParseError(f"{where}: bad number {text!r}") from exc


def load_bars(path: str) -> list[Bar]:
    """Load and validate bars from one CSV file.

    Returns bars sorted by (symbol, date). Raises :class:`ParseError` with the
    offending line number, :class:`ValidationError` on OHLC violations, and
    :class:`DuplicateBarError` on repeated (symbol, date) pairs.
    """
    bars: list[Bar] = []
    seen: set[tuple[str, Date]] = set()
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if tuple(header[: len(BAR_COLUMNS)]) != BAR_COLUMNS:
            raise ParseError(f"{path}: header {header} does not match {list(BAR_COLUMNS)}")
        has_adjusted = len(header) > len(BAR_COLUMNS) and header[len(BAR_COLUMNS)] == "adjusted_close"
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            where = f"{path}:{lineno}"
            if len(row) < len(BAR_COLUMNS):
                raise ParseError(f"{where}: expected {len(BAR_COLUMNS)} fields, got {len(row)}")
            symbol = row[0].strip()
            if not symbol:
                raise ParseError(f"{where}: empty symbol")
            day = _parse_date(row[1], where)
            try:
                volume = int(row[6])
            except ValueError as exc:
                raise ParseError(f"{where}: bad volume {row[6]!r}") from exc
            adjusted = None
            if has_adjusted and len(row) > 7 and row[7].strip():
                adjusted = _parse_float(row[7], where)
            bar = Bar(
                symbol=symbol,
                date=day,
                open=_parse_float(row[2], where),
                high=_parse_float(row[3], where),
                low=_parse_float(row[4], where),
                close=_parse_float(row[5], where),
                volume=volume,
                adjusted_close=adjusted,
            )
            try:
                bar.validate()
            except ValidationError as exc:
                raise ValidationError(f"{where}: {exc}") from None
            key = (bar.symbol, bar.date)
            if key in seen:
                raise DuplicateBarError(f"{where}: duplicate bar for {symbol} {day}")
            seen.add(key)
            bars.append(bar)
    bars.sort(key=lambda b: (b.symbol, b.date))
    return bars


def save_bars(bars: list[Bar], path: str) -> None:
    """Write bars in the canonical CSV schema (round-trips through load_bars)."""
    ordered = sorted(bars, key=lambda b: (b.symbol, b.date))
    has_adjusted = any(b.adjusted_close is not None for b in ordered)
    columns = BAR_COLUMNS + (OPTIONAL_BAR_COLUMNS if has_adjusted else ())
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(columns)
        for b in ordered:
            row = [b.symbol, b.date.isoformat(), repr(b.open), repr(b.high),
                   repr(b.low), repr(b.close), str(b.volume)]
            if has_adjusted:
                row.append("" if b.adjusted_close is None else repr(b.adjusted_close))
            writer.writerow(row)


def load_news(path: str) -> list[NewsItem]:
    """Load news from a JSONL file, one object per line."""
    items: list[NewsItem] = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            where = f"{path}:{lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{where}: {exc}") from None
            try:
                item = NewsItem(
                    timestamp=datetime.fromisoformat(obj["timestamp"]),
                    symbols=tuple(obj.get("symbols", ())),
                    headline=obj["headline"],
                    body=obj.get("body", ""),
                    source=obj.get("source", ""),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"{where}: {exc}") from None
            item.validate()
            items.append(item)
    items.sort(key=lambda n: n.timestamp)
    return items


def load_assets(path: str) -> dict[str, AssetMeta]:
    """Load the symbol -> sector map from assets.csv."""
    meta: dict[str, AssetMeta] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["symbol", "sector"]:
            raise ParseError(f"{path}: header must start with symbol,sector")
        for lineno, row in enumerate(reader, start=2):
            if not row or not row[0].strip():
                continue
            symbol, sector = row[0].strip(), row[1].strip()
            if not sector:
                raise ValidationError(f"{path}:{lineno}: empty sector for {symbol}")
            meta[symbol] = AssetMeta(symbol=symbol, sector=sector)
    return meta


class TradingCalendar:
    """Sorted unique trading days with week-boundary queries."""

    def __init__(self, days: list[Date]):
        if not days:
            raise EmptyDatasetError("calendar requires at least one trading day")
        self.days: tuple[Date, ...] = tuple(sorted(set(days)))
        self._index = {d: i for i, d in enumerate(self.days)}

    def __len__(self) -> int:
        return len(self.days)

    def __contains__(self, day: Date) -> bool:
        return day in self._index

    def index_of(self, day: Date) -> int:
        try:
            return self._index[day]
        except KeyError:
            raise ValidationError(f"{day} is not a trading day") from None

    def last_trading_day_of_week(self, day: Date) -> bool:
        """True when no later trading day falls in the same ISO week."""
        i = self.index_of(day)
        if i == len(self.days) - 1:
            return True
        return self.days[i + 1].isocalendar()[:2] != day.isocalendar()[:2]

    def week_final_days(self) -> list[Date]:
        return [d for d in self.days if self.last_trading_day_of_week(d)]


def trading_calendar(bars: list[Bar]) -> TradingCalendar:
    """Build the calendar of days on which at least one bar exists."""
    if not bars:
        raise EmptyDatasetError("no bars supplied")
    return TradingCalendar([b.date for b in bars])


@dataclass
class _SymbolSeries:
    dates: list[Date]
    open: np.ndarray
    high: np.ndarray
    low: np.ndarray
    close: np.ndarray
    volume: np.ndarray
    adjusted_close: np.ndarray


class Dataset:
    """Immutable container for bars, news, and asset metadata.

    ``average_daily_volume`` on each :class:`AssetMeta` is maintained here as a
    trailing mean of dollar-neutral share volume over ``adv_window`` days.
    """

    def __init__(
        self,
        bars: list[Bar],
        news: list[NewsItem] | None = None,
        assets: dict[str, AssetMeta] | None = None,
        adv_window: int = 20,
    ):
        if not bars:
            raise EmptyDatasetError("dataset requires bars")
        self.calendar = trading_calendar(bars)
        self.news: tuple[NewsItem, ...] = tuple(news or ())
        self.adv_window = adv_window
        self._series: dict[str, _SymbolSeries] = {}
        by_symbol: dict[str, list[Bar]] = {}
        for bar in sorted(bars, key=lambda b: (b.symbol, b.date)):
            by_symbol.setdefault(bar.symbol, []).append(bar)
        for symbol, sym_bars in by_symbol.items():
            self._series[symbol] = _SymbolSeries(
                dates=[b.date for b in sym_bars],
                open=np.array([b.open for b in sym_bars], dtype=float),
                high=np.array([b.high for b in sym_bars], dtype=float),
                low=np.array([b.low for b in sym_bars], dtype=float),
                close=np.array([b.close for b in sym_bars], dtype=float),
                volume=np.array([b.volume for b in sym_bars], dtype=float),
                adjusted_close=np.array(
                    [b.adjusted_close if b.adjusted_close is not None else np.nan for b in sym_bars],
                    dtype=float,
                ),
            )
        self.symbols: tuple[str, ...] = tuple(sorted(self._series))
        base = assets or {}
        self.assets: dict[str, AssetMeta] = {}
        for symbol in self.symbols:
            sector = base[symbol].sector if symbol in base else "UNKNOWN"
            self.assets[symbol] = AssetMeta(symbol=symbol, sector=sector)

    def has_symbol(self, symbol: str) -> bool:
        return symbol in self._series

    def series(self, symbol: str) -> _SymbolSeries:
        return self._series[symbol]

    def average_daily_volume(self, symbol: str, day: Date) -> float:
        """Trailing mean share volume over the configured window ending at day."""
        s = self._series[symbol]
        hi = bisect_right(s.dates, day)
        lo = max(0, hi - self.adv_window)
        if hi == lo:
            return 0.0
        return float(np.mean(s.volume[lo:hi]))

    def view_at(self, cursor: Date) -> "MarketView":
        if cursor not in self.calendar:
            raise ValidationError(f"{cursor} is not in the trading calendar")
        return MarketView(self, cursor)


class MarketView:
    """Read-only window over a dataset, bounded by a cursor date.

    Every accessor refuses dates after the cursor with a hard
    :class:`LookaheadError`; nothing is silently truncated.
    """

    def __init__(self, dataset: Dataset, cursor: Date):
        self._dataset = dataset
        self.cursor = cursor
        self.cursor_index = dataset.calendar.index_of(cursor)
        self.universe = dataset.symbols

    def _check(self, day: Date) -> None:
        if day > self.cursor:
            raise LookaheadError(f"requested {day} after cursor {self.cursor}")

    def _bound(self, symbol: str) -> int:
        s = self._dataset.series(symbol)
        return bisect_right(s.dates, self.cursor)

    def dates(self, symbol: str) -> list[Date]:
        """Trading days for symbol up to the cursor."""
        s = self._dataset.series(symbol)
        return s.dates[: self._bound(symbol)]

    def channel(self, symbol: str, name: str) -> np.ndarray:
        """One price/volume channel for symbol, truncated at the cursor."""
        s = self._dataset.series(symbol)
        return getattr(s, name)[: self._bound(symbol)].copy()

    def closes(self, symbol: str) -> np.ndarray:
        return self.channel(symbol, "close")

    def ohlcv(self, symbol: str) -> dict[str, np.ndarray]:
        bound = self._bound(symbol)
        s = self._dataset.series(symbol)
        return {
            "open": s.open[:bound].copy(),
            "high": s.high[:bound].copy(),
            "low": s.low[:bound].copy(),
            "close": s.close[:bound].copy(),
            "volume": s.volume[:bound].copy(),
        }

    def close_on(self, symbol: str, day: Date) -> float | None:
        """Close for symbol on day, None when the symbol did not trade."""
        self._check(day)
        s = self._dataset.series(symbol)
        i = bisect_right(s.dates, day) - 1
        if i < 0 or s.dates[i] != day:
            return None
        return float(s.close[i])

    def bar_on(self, symbol: str, day: Date) -> Bar | None:
        self._check(day)
        s = self._dataset.series(symbol)
        i = bisect_right(s.dates, day) - 1
        if i < 0 or s.dates[i] != day:
            return None
        adj = s.adjusted_close[i]
        return Bar(
            symbol=symbol,
            date=day,
            open=float(s.open[i]),
            high=float(s.high[i]),
            low=float(s.low[i]),
            close=float(s.close[i]),
            volume=int(s.volume[i]),
            adjusted_close=None if np.isnan(adj) else float(adj),
        )

    def last_close(self, symbol: str) -> float | None:
        """Most recent close at or before the cursor."""
        bound = self._bound(symbol)
        if bound == 0:
            return None
        return float(self._dataset.series(symbol).close[bound - 1])

    def news_until(self, limit: int | None = None) -> list[NewsItem]:
        """News with timestamps on or before the cursor's end of day."""
        out = [n for n in self._dataset.news if n.timestamp.date() <= self.cursor]
        if limit is not None:
            out = out[-limit:]
        return out

    def news_on(self, day: Date) -> list[NewsItem]:
        self._check(day)
        return [n for n in self._dataset.news if n.timestamp.date() == day]

    def asset_meta(self, symbol: str) -> AssetMeta:
        meta = self._dataset.assets[symbol]
        adv = self._dataset.average_daily_volume(symbol, self.cursor)
        return AssetMeta(symbol=symbol, sector=meta.sector, average_daily_volume=adv)

    def calendar_days(self) -> list[Date]:
        """Trading days up to and including the cursor."""
        return list(self._dataset.calendar.days[: self.cursor_index + 1])


def load_dataset(data_dir: str, adv_window: int = 20) -> Dataset:
    """Load the documented data directory layout.

    ``data/bars/*.csv`` (required), ``data/news/*.jsonl`` (optional),
    ``data/assets.csv`` (optional sector map).
    """
    bars_dir = os.path.join(data_dir, "bars")
    if not os.path.isdir(bars_dir):
        raise EmptyDatasetError(f"missing bars directory {bars_dir}")
    bars: list[Bar] = []
    seen: set[tuple[str, Date]] = set()
    for name in sorted(os.listdir(bars_dir)):
        if not name.endswith(".csv"):
            continue
        for bar in load_bars(os.path.join(bars_dir, name)):
            key = (bar.symbol, bar.date)
            if key in seen:
                raise DuplicateBarError(f"duplicate bar for {key} across files")
            seen.add(key)
            bars.append(bar)
    news: list[NewsItem] = []
    news_dir = os.path.join(data_dir, "news")
    if os.path.isdir(news_dir):
        for name in sorted(os.listdir(news_dir)):
            if name.endswith(".jsonl"):
                news.extend(load_news(os.path.join(news_dir, name)))
        news.sort(key=lambda n: n.timestamp)
    assets_path = os.path.join(data_dir, "assets.csv")
    assets = load_assets(assets_path) if os.path.exists(assets_path) else None
    return Dataset(bars, news=news, assets=assets, adv_window=adv_window)
