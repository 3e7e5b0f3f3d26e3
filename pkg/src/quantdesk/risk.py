"""Portfolio risk scoring, alert triggering, and the stress/sentiment stubs.

The risk score is a weighted sum of four components -- portfolio beta,
inverse liquidity, peak sector exposure, and return volatility -- each
normalized into [0,1] before weighting (the raw quantities live on wildly
different scales, and 1/LR is unbounded, so the 0.75 alert threshold is only
meaningful after normalization). Normalization constants are engine choices,
configurable, and recorded on the report.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict

import numpy as np

from .errors import ConfigError, DegenerateInputError, InsufficientDataError
from .marketdata import AssetMeta, MarketView, NewsItem
from .portfolio import CASH, Account, mark_to_market

RAM_THRESHOLD = 0.75

DEFAULT_RISK_WEIGHTS = (0.3, 0.2, 0.2, 0.3)
DEFAULT_STRESS_SHOCKS = (-0.10, -0.20, -0.30)
DEFAULT_PARTICIPATION = 0.10

# sentiment lexicon for the deterministic stub provider
POSITIVE_WORDS = frozenset((
    "gain", "gains", "rally", "rallies", "surge", "surges", "beat", "beats",
    "record", "upgrade", "upgraded", "strong", "growth", "profit", "profits",
    "bullish", "optimism", "optimistic", "soar", "soars", "outperform",
    "expand", "expands", "boost", "boosts", "recovery", "rebound", "rebounds",
))
NEGATIVE_WORDS = frozenset((
    "loss", "losses", "fall", "falls", "drop", "drops", "plunge", "plunges",
    "miss", "misses", "downgrade", "downgraded", "weak", "decline", "declines",
    "bearish", "fear", "fears", "slump", "slumps", "underperform", "lawsuit",
    "recall", "recalls", "cut", "cuts", "crash", "crashes", "warning",
))


@dataclass(frozen=True)
class RiskWeights:
    beta: float = DEFAULT_RISK_WEIGHTS[0]
    liquidity: float = DEFAULT_RISK_WEIGHTS[1]
    sector: float = DEFAULT_RISK_WEIGHTS[2]
    volatility: float = DEFAULT_RISK_WEIGHTS[3]

    def validate(self) -> None:
        values = (self.beta, self.liquidity, self.sector, self.volatility)
        if any(w < 0 for w in values):
            raise ConfigError("risk weights must be non-negative")
        if abs(sum(values) - 1.0) > 1e-9:
            raise ConfigError("risk weights must sum to 1")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.beta, self.liquidity, self.sector, self.volatility)


@dataclass(frozen=True)
class RiskReport:
    """Raw components, their normalized values, the weighted score, and the
    stress/sentiment channels."""

    beta_p: float
    liquidity_ratio: float
    sector_exposure: dict[str, float]
    sigma_p: float
    normalized: tuple[float, float, float, float]
    weights: tuple[float, float, float, float]
    r_score: float
    eta: float
    tau: float

    def to_json(self) -> str:
        payload = asdict(self)
        payload["sector_exposure"] = dict(sorted(self.sector_exposure.items()))
        payload["normalized"] = list(self.normalized)
        payload["weights"] = list(self.weights)
        return json.dumps(payload, sort_keys=True)


def portfolio_beta(port_returns, bench_returns, window: int = 60) -> float:
    """Regression slope of portfolio returns on benchmark returns.

    Uses the trailing ``window`` observations of the aligned series; needs at
    least 20 and positive benchmark variance.
    """
    p = np.asarray(port_returns, dtype=float)
    b = np.asarray(bench_returns, dtype=float)
    if len(p) != len(b):
        raise InsufficientDataError("portfolio and benchmark series must align")
    if len(p) < 20:
        raise InsufficientDataError("beta needs at least 20 aligned returns")
    p, b = p[-window:], b[-window:]
    var = float(np.var(b, ddof=1))
    if var == 0.0:
        raise DegenerateInputError("benchmark variance is zero")
    cov = float(np.cov(p, b, ddof=1)[0, 1])
    return cov / var


def liquidity_ratio(acct: Account, meta: dict[str, AssetMeta], prices: MarketView,
                    participation: float = DEFAULT_PARTICIPATION) -> float:
    """Fraction of net value convertible to cash within one session.

    Each position counts up to ``participation`` of its average-daily-volume
    value; cash counts in full.
    """
    net_value, _ = mark_to_market(acct, prices)
    liquid = acct.cash
    for symbol, pos in acct.positions.items():
        price = prices.last_close(symbol)
        position_value = pos.quantity * price
        adv_value = meta[symbol].average_daily_volume * price
        liquid += min(position_value, participation * adv_value)
    return liquid / net_value


def sector_exposure(acct: Account, meta: dict[str, AssetMeta], prices: MarketView) -> dict[str, float]:
    net_value, weights = mark_to_market(acct, prices)
    out: dict[str, float] = {}
    for symbol, weight in weights.items():
        if symbol == CASH:
            continue
        sector = meta[symbol].sector
        out[sector] = out.get(sector, 0.0) + weight
    return out


def normalize_components(beta_p: float, lr: float, max_sector: float, sigma_p: float,
                         sigma_ref: float) -> tuple[float, float, float, float]:
    """Map the four raw components into [0,1].

    beta: |beta|/2 clipped; liquidity: (1/LR - 1)/9 clipped (LR=0.1 maps
    to 1); sector: max exposure is already a fraction; volatility:
    sigma_p/sigma_ref clipped, sigma_ref defaulting to 3x benchmark
    volatility. All constants are engine choices.
    """
    beta_n = min(max(abs(beta_p) / 2.0, 0.0), 1.0)
    inv_lr = (1.0 / lr) if lr > 0 else math.inf
    liq_n = min(max((inv_lr - 1.0) / 9.0, 0.0), 1.0)
    sector_n = min(max(max_sector, 0.0), 1.0)
    vol_n = min(max(sigma_p / sigma_ref, 0.0), 1.0) if sigma_ref > 0 else (1.0 if sigma_p > 0 else 0.0)
    return (beta_n, liq_n, sector_n, vol_n)


def risk_score(normalized: tuple[float, float, float, float],
               weights: RiskWeights | tuple[float, float, float, float]) -> float:
    """Weighted sum of the normalized components; stays in [0,1]."""
    if isinstance(weights, RiskWeights):
        weights.validate()
        w = weights.as_tuple()
    else:
        w = tuple(float(x) for x in weights)
        if any(x < 0 for x in w) or abs(sum(w) - 1.0) > 1e-9:
            raise ConfigError("risk weights must be non-negative and sum to 1")
    if len(normalized) != 4:
        raise ConfigError("expected four normalized components")
    return float(sum(wi * ci for wi, ci in zip(w, normalized)))


def should_trigger_ram(r_score: float) -> bool:
    """Strictly above the alert threshold fires; exactly at it does not."""
    return r_score > RAM_THRESHOLD


@dataclass
class RamHysteresis:
    """Suppress repeat alerts after a trigger until the score cools off.

    Re-arms when the score falls below ``resume_below`` or once
    ``cooldown_days`` trading days have passed since the last alert.
    """

    resume_below: float = 0.6
    cooldown_days: int = 5
    armed: bool = True
    last_fire_index: int | None = None

    def update(self, day_index: int, r_score: float) -> bool:
        if not self.armed:
            if r_score < self.resume_below:
                self.armed = True
            elif self.last_fire_index is not None and day_index - self.last_fire_index >= self.cooldown_days:
                self.armed = True
        if self.armed and should_trigger_ram(r_score):
            self.armed = False
            self.last_fire_index = day_index
            return True
        return False


def stress_severity(acct: Account, prices: MarketView,
                    shocks: tuple[float, ...] = DEFAULT_STRESS_SHOCKS) -> float:
    """Deterministic stress stub: worst uniform-shock loss over the scenario
    set, scaled by the largest configured shock; in [0,1]."""
    if not shocks:
        return 0.0
    net_value, weights = mark_to_market(acct, prices)
    equity_fraction = 1.0 - weights.get(CASH, 0.0)
    max_shock = max(abs(s) for s in shocks)
    if max_shock == 0.0:
        return 0.0
    worst_loss_fraction = max(equity_fraction * abs(s) for s in shocks)
    return min(max(worst_loss_fraction / max_shock, 0.0), 1.0)


def _tokens(text: str) -> list[str]:
    return [t for t in "".join(c.lower() if c.isalnum() else " " for c in text).split() if t]


def sentiment_score(news: list[NewsItem], symbols: list[str] | tuple[str, ...] = ()) -> float:
    """Deterministic lexicon stub: (pos - neg)/(pos + neg + 1) over headline
    and body tokens of items mentioning the symbols; in [-1,1]."""
    pos = neg = 0
    for item in news:
        if symbols and not item.mentions(symbols):
            continue
        for token in _tokens(item.headline + " " + item.body):
            if token in POSITIVE_WORDS:
                pos += 1
            elif token in NEGATIVE_WORDS:
                neg += 1
    tau = (pos - neg) / (pos + neg + 1)
    return min(max(tau, -1.0), 1.0)


def build_risk_report(acct: Account, prices: MarketView, meta: dict[str, AssetMeta],
                      port_returns, bench_returns, *,
                      weights: RiskWeights = RiskWeights(),
                      participation: float = DEFAULT_PARTICIPATION,
                      beta_window: int = 60, vol_window: int = 20,
                      shocks: tuple[float, ...] = DEFAULT_STRESS_SHOCKS,
                      news: list[NewsItem] | None = None,
                      sentiment_provider=None) -> RiskReport:
    """Assemble the full report from account state and return history."""
    beta = portfolio_beta(port_returns, bench_returns, window=beta_window)
    lr = liquidity_ratio(acct, meta, prices, participation=participation)
    exposure = sector_exposure(acct, meta, prices)
    max_sector = max(exposure.values(), default=0.0)
    p = np.asarray(port_returns, dtype=float)[-vol_window:]
    b = np.asarray(bench_returns, dtype=float)[-vol_window:]
    if len(p) < 2:
        raise InsufficientDataError("volatility window needs at least two returns")
    sigma_p = float(np.std(p, ddof=1))
    sigma_ref = 3.0 * float(np.std(b, ddof=1))
    normalized = normalize_components(beta, lr, max_sector, sigma_p, sigma_ref)
    score = risk_score(normalized, weights)
    eta = stress_severity(acct, prices, shocks=shocks)
    held = sorted(acct.positions)
    items = news if news is not None else []
    if sentiment_provider is not None:
        tau = float(sentiment_provider(items, held))
    else:
        tau = sentiment_score(items, held)
    tau = min(max(tau, -1.0), 1.0)
    return RiskReport(
        beta_p=beta,
        liquidity_ratio=lr,
        sector_exposure=exposure,
        sigma_p=sigma_p,
        normalized=normalized,
        weights=weights.as_tuple(),
        r_score=score,
        eta=eta,
        tau=tau,
    )
