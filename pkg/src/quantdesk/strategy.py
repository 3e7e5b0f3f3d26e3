"""Strategy pool, target-weight rules, and simulated-trading backtests.

The pool is the Cartesian product of indicator specs x selection sizes
(x optional entry thresholds), always joined by the classical MV / ZMR / TSM
baselines and an inert all-cash strategy. Every strategy is a deterministic
function of a time-bounded market view; simulated runs rebalance weekly on
week-final days with fills at the next session's close, matching the live
engine's convention.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import date as Date

import numpy as np

from . import indicators
from .errors import ConfigError, InsufficientDataError, ValidationError
from .marketdata import Dataset, MarketView
from .metrics import MetricsReport, compute_report, filter_invested
from .portfolio import CASH, Account, Action, ActionKind, apply_action, mark_to_market

logger = logging.getLogger(__name__)

CLASSICAL_KINDS = ("MV", "ZMR", "TSM")


@dataclass(frozen=True)
class Strategy:
    """A parameterized trading rule; same view in, same weights out."""

    id: str
    kind: str  # IndicatorRule | MV | ZMR | TSM | Cash
    params: dict = field(default_factory=dict)
    description: str = ""

    def __post_init__(self):
        if self.kind == "IndicatorRule":
            spec = indicators.parse_spec(self.params["indicator"])
            line = self.params.get("line") or indicators.primary_line(spec.name)
            if not indicators.is_causal(spec, line):
                raise ConfigError(
                    f"{self.id}: indicator line {spec.name}.{line} reads ahead "
                    "and cannot drive a strategy")


@dataclass(frozen=True)
class StrategyPool:
    strategies: tuple[Strategy, ...]

    def __post_init__(self):
        ids = [s.id for s in self.strategies]
        if len(ids) != len(set(ids)):
            raise ConfigError("strategy ids must be unique")
        if not ids:
            raise ConfigError("pool must hold at least one strategy")

    def get(self, strategy_id: str) -> Strategy:
        for s in self.strategies:
            if s.id == strategy_id:
                return s
        raise KeyError(strategy_id)

    def ids(self) -> list[str]:
        return [s.id for s in self.strategies]


@dataclass(frozen=True)
class BacktestResult:
    """One strategy's simulated run over a window."""

    strategy_id: str
    window: tuple[Date, Date]
    dates: tuple[Date, ...]
    net_values: tuple[float, ...]
    metrics: MetricsReport
    rewards: tuple[float, ...]  # week-over-week portfolio returns

    def to_dict(self) -> dict:
        return {
            "strategy_id": self.strategy_id,
            "window": [self.window[0].isoformat(), self.window[1].isoformat()],
            "dates": [d.isoformat() for d in self.dates],
            "net_values": list(self.net_values),
            "metrics": {k: getattr(self.metrics, k) for k in
                        ("TR", "ARR", "SR", "SoR", "CR", "MDD", "Vol", "ENT", "ENB")},
            "rewards": list(self.rewards),
        }


@dataclass(frozen=True)
class PoolConfig:
    """Generation grids for the pool."""

    indicator_specs: tuple[str, ...] = ("SMA(n=10)", "SMA(n=20)", "RSI(n=14)", "ROC(n=10)")
    top_ks: tuple[int, ...] = (3, 5)
    entry_thresholds: tuple[float | None, ...] = (None,)
    max_size: int = 32
    tsm_lookback: int = 20
    tsm_top_k: int = 5
    zmr_window: int = 20
    zmr_threshold: float = 1.0
    zmr_top_k: int = 5
    mv_window: int = 60
    mv_risk_aversion: float = 1.0


def generate_pool(config: PoolConfig) -> StrategyPool:
    """Enumerate the grid product, dedupe by id, cap, and add the baselines.

    The classical baselines (and the all-cash strategy) are always kept; when
    the grid overflows ``max_size`` the indicator rules are truncated in id
    order with a warning.
    """
    if not config.indicator_specs or not config.top_ks:
        raise ConfigError("pool grids must be non-empty")
    rules: dict[str, Strategy] = {}
    for spec_text in config.indicator_specs:
        spec = indicators.parse_spec(spec_text)
        for top_k in config.top_ks:
            if top_k < 1:
                raise ConfigError("top_k must be at least 1")
            for threshold in config.entry_thresholds:
                sid = f"ind:{spec.canonical()}:k={top_k}"
                params = {"indicator": spec.canonical(), "top_k": top_k}
                if threshold is not None:
                    sid += f":t={threshold}"
                    params["threshold"] = threshold
                rules.setdefault(sid, Strategy(
                    id=sid, kind="IndicatorRule", params=params,
                    description=f"rank by {spec.canonical()}, hold top {top_k}"))
    classical = [
        Strategy(id="mv", kind="MV",
                 params={"window": config.mv_window, "risk_aversion": config.mv_risk_aversion},
                 description="long-only mean-variance via projected gradient"),
        Strategy(id="zmr", kind="ZMR",
                 params={"window": config.zmr_window, "threshold": config.zmr_threshold,
                         "top_k": config.zmr_top_k},
                 description="long the most oversold assets by rolling z-score"),
        Strategy(id="tsm", kind="TSM",
                 params={"lookback": config.tsm_lookback, "top_k": config.tsm_top_k},
                 description="long the best trailing-return assets"),
        Strategy(id="cash", kind="Cash", params={}, description="hold cash"),
    ]
    budget = max(config.max_size - len(classical), 0)
    ordered = [rules[k] for k in sorted(rules)]
    if len(ordered) > budget:
        logger.warning("pool capped at %d: truncating %d indicator rules to %d",
                       config.max_size, len(ordered), budget)
        ordered = ordered[:budget]
    return StrategyPool(strategies=tuple(ordered + classical))


class SignalCache:
    """Per-dataset cache of full-series indicator lines.

    Only causal lines may be cached: for those, the value at index i is a
    function of bars[0..i] alone, so reading at or before a cursor is
    equivalent to recomputing on the cursor-bounded view.
    """

    def __init__(self, dataset: Dataset):
        self._dataset = dataset
        self._cache: dict[tuple[str, str, str], np.ndarray] = {}

    def line(self, symbol: str, spec: indicators.IndicatorSpec, line: str) -> np.ndarray:
        if not indicators.is_causal(spec, line):
            raise ConfigError(f"cannot cache non-causal line {spec.name}.{line}")
        key = (symbol, spec.canonical(), line)
        if key not in self._cache:
            s = self._dataset.series(symbol)
            arrays = {"open": s.open, "high": s.high, "low": s.low,
                      "close": s.close, "volume": s.volume}
            out = indicators.compute_arrays(spec, arrays)
            for name, values in out.items():
                self._cache[(symbol, spec.canonical(), name)] = values
        return self._cache[key]

    def value_at(self, symbol: str, spec: indicators.IndicatorSpec, line: str,
                 view: MarketView) -> float | None:
        """Latest defined value at or before the view cursor, None if warm-up."""
        values = self.line(symbol, spec, line)
        dates = self._dataset.series(symbol).dates
        from bisect import bisect_right
        bound = bisect_right(dates, view.cursor)
        if bound == 0:
            return None
        v = values[bound - 1]
        return None if np.isnan(v) else float(v)


def _equal_weights(symbols: list[str]) -> dict[str, float]:
    if not symbols:
        return {}
    w = 1.0 / len(symbols)
    return {s: w for s in sorted(symbols)}


def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {w : w >= 0, sum w = 1}."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    rho = np.nonzero(u * np.arange(1, len(v) + 1) > (css - 1.0))[0][-1]
    theta = (css[rho] - 1.0) / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def solve_mean_variance(mu: np.ndarray, cov: np.ndarray, risk_aversion: float = 1.0,
                        max_iter: int = 10000, tol: float = 1e-12) -> np.ndarray:
    """Long-only mean-variance weights by projected gradient ascent.

    Maximizes mu'w - (a/2) w'Sigma w over the simplex; returns a fixed point
    of the projected-gradient step."""
    n = len(mu)
    if n == 1:
        return np.array([1.0])
    eigmax = float(np.max(np.linalg.eigvalsh(cov))) if n > 1 else float(cov)
    lipschitz = risk_aversion * max(eigmax, 0.0) + 1e-9
    step = 1.0 / lipschitz if lipschitz > 0 else 1.0
    step = min(step, 1e4)
    w = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        grad = mu - risk_aversion * (cov @ w)
        w_next = project_to_simplex(w + step * grad)
        if np.max(np.abs(w_next - w)) < tol:
            return w_next
        w = w_next
    return w


def _trailing_returns(view: MarketView, symbol: str, window: int) -> np.ndarray | None:
    closes = view.closes(symbol)
    if len(closes) < window + 1:
        return None
    tail = closes[-(window + 1):]
    return tail[1:] / tail[:-1] - 1.0


def target_weights(strategy: Strategy, view: MarketView,
                   cache: SignalCache | None = None) -> dict[str, float]:
    """Simplex weights over the universe (cash is the implicit remainder).

    Insufficient history is a warm-up signal: the strategy stays in cash.
    """
    kind = strategy.kind
    p = strategy.params
    universe = sorted(view.universe)
    if kind == "Cash":
        return {}
    if kind == "IndicatorRule":
        spec = indicators.parse_spec(p["indicator"])
        line = p.get("line") or indicators.primary_line(spec.name)
        threshold = p.get("threshold")
        signals: dict[str, float] = {}
        for symbol in universe:
            if cache is not None:
                value = cache.value_at(symbol, spec, line, view)
            else:
                arrays = view.ohlcv(symbol)
                if len(arrays["close"]) == 0:
                    value = None
                else:
                    out = indicators.compute_arrays(spec, arrays)[line]
                    idx = np.flatnonzero(~np.isnan(out))
                    value = float(out[idx[-1]]) if idx.size else None
            if value is None:
                continue
            if threshold is not None and value < threshold:
                continue
            signals[symbol] = value
        ranked = sorted(signals, key=lambda s: (-signals[s], s))
        return _equal_weights(ranked[: int(p["top_k"])])
    if kind == "TSM":
        lookback = int(p["lookback"])
        momentum: dict[str, float] = {}
        for symbol in universe:
            closes = view.closes(symbol)
            if len(closes) < lookback + 1:
                continue
            momentum[symbol] = float(closes[-1] / closes[-1 - lookback] - 1.0)
        ranked = sorted(momentum, key=lambda s: (-momentum[s], s))
        return _equal_weights(ranked[: int(p["top_k"])])
    if kind == "ZMR":
        window = int(p["window"])
        threshold = float(p["threshold"])
        spec = indicators.IndicatorSpec("ZSCORE", {"n": window})
        scores: dict[str, float] = {}
        for symbol in universe:
            if cache is not None:
                z = cache.value_at(symbol, spec, "zscore", view)
            else:
                closes = view.closes(symbol)
                if len(closes) < window:
                    z = None
                else:
                    tail = closes[-window:]
                    sd = float(np.std(tail, ddof=1))
                    z = 0.0 if sd == 0 else float((closes[-1] - tail.mean()) / sd)
            if z is None or z > -threshold:
                continue
            scores[symbol] = z
        ranked = sorted(scores, key=lambda s: (scores[s], s))  # most oversold first
        return _equal_weights(ranked[: int(p["top_k"])])
    if kind == "MV":
        window = int(p["window"])
        usable: list[str] = []
        rows: list[np.ndarray] = []
        for symbol in universe:
            r = _trailing_returns(view, symbol, window)
            if r is not None:
                usable.append(symbol)
                rows.append(r)
        if len(usable) == 0:
            return {}
        if len(usable) == 1:
            return {usable[0]: 1.0}
        matrix = np.vstack(rows)
        mu = matrix.mean(axis=1)
        cov = np.cov(matrix, ddof=1)
        w = solve_mean_variance(mu, cov, risk_aversion=float(p["risk_aversion"]))
        return {s: float(wi) for s, wi in zip(usable, w) if wi > 1e-12}
    raise ConfigError(f"unknown strategy kind {kind!r}")


def required_lookback(strategy: Strategy) -> int:
    """Trading days of history the strategy needs before emitting weights."""
    p = strategy.params
    if strategy.kind == "Cash":
        return 0
    if strategy.kind == "TSM":
        return int(p["lookback"]) + 1
    if strategy.kind == "ZMR":
        return int(p["window"])
    if strategy.kind == "MV":
        return int(p["window"]) + 1
    spec = indicators.parse_spec(p["indicator"])
    ints = [v for v in spec.params.values() if isinstance(v, int)]
    defaults = [v for v in indicators.catalog_entry(spec.name).defaults.values()
                if isinstance(v, int)]
    return max(ints + defaults + [1]) + 1


def _week_marks(dataset: Dataset, start: Date, end: Date) -> list[Date]:
    days = [d for d in dataset.calendar.days if start <= d <= end]
    marks = [d for d in days if dataset.calendar.last_trading_day_of_week(d)]
    if days and (not marks or marks[-1] != days[-1]):
        marks.append(days[-1])
    return marks


def simulate(strategy: Strategy, window: tuple[Date, Date], dataset: Dataset,
             *, fee_rate: float = 0.001, initial_cash: float = 1_000_000.0,
             cache: SignalCache | None = None) -> BacktestResult:
    """Walk the window day by day with weekly rebalances to target weights.

    Weight decisions happen at each week-final close and fill at the next
    session's close. Fully deterministic: the same call returns a
    bit-identical result.
    """
    start, end = window
    days = [d for d in dataset.calendar.days if start <= d <= end]
    if len(days) < 2:
        raise InsufficientDataError("window must span at least two trading days")
    history = dataset.calendar.index_of(days[-1]) + 1
    if history < required_lookback(strategy):
        raise InsufficientDataError(
            f"{strategy.id}: window ends with {history} days of history, "
            f"lookback needs {required_lookback(strategy)}")
    acct = Account(cash=initial_cash, fee_rate=fee_rate)
    pending: dict[str, float] | None = None
    dates: list[Date] = []
    net_values: list[float] = []
    weight_rows: list[list[float]] = []
    columns = sorted(dataset.symbols) + [CASH]
    mark_values: list[float] = []
    marks = set(_week_marks(dataset, start, end))
    for day in days:
        view = dataset.view_at(day)
        if pending is not None:
            apply_action(acct, Action(kind=ActionKind.REBALANCE,
                                      payload={"weights": pending}), view)
            pending = None
        nv, weights = mark_to_market(acct, view)
        dates.append(day)
        net_values.append(nv)
        weight_rows.append([weights.get(c, 0.0) for c in columns])
        if day in marks:
            mark_values.append(nv)
            if day != days[-1]:
                pending = target_weights(strategy, view, cache=cache)
    if not mark_values or dates[0] not in marks:
        mark_values.insert(0, net_values[0])
    rewards = tuple(float(b / a - 1.0) for a, b in zip(mark_values, mark_values[1:]))
    nv_arr = np.array(net_values)
    report = compute_report(nv_arr, weights=filter_invested(np.array(weight_rows)))
    return BacktestResult(
        strategy_id=strategy.id,
        window=(start, end),
        dates=tuple(dates),
        net_values=tuple(net_values),
        metrics=report,
        rewards=rewards,
    )


def select_candidates(pool: StrategyPool, results: dict[str, BacktestResult],
                      top_m: int = 3) -> list[str]:
    """Best strategies by Sharpe, ties broken by lower drawdown, then id.

    Strategies with degenerate Sharpe (all-cash runs) rank last. top_m above
    the pool size clips with a warning.
    """
    missing = [sid for sid in pool.ids() if sid not in results]
    if missing:
        raise ValidationError(f"no backtest result for {missing}")
    if top_m > len(pool.strategies):
        logger.warning("top_m=%d exceeds pool size %d; clipping", top_m, len(pool.strategies))
        top_m = len(pool.strategies)

    def key(sid: str):
        m = results[sid].metrics
        sharpe = m.SR if m.SR is not None else float("-inf")
        mdd = m.MDD if m.MDD is not None else float("inf")
        return (-sharpe, mdd, sid)

    ranked = sorted(pool.ids(), key=key)
    return ranked[:top_m]
