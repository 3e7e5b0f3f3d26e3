"""Nine evaluation metrics over net-value series and portfolio weight history.

Percent-valued metrics (TR, ARR, MDD, Vol) are reported unscaled, e.g. 58.68
rather than 0.5868. MDD and Vol are reported positive ("lower is better").
Entropy uses natural log (nats). ENB is implemented exactly as its source
formula ``1 / sum((p_i ln p_i)^2)`` (which differs from the usual
effective-number-of-bets definition; kept as written). ARR deviates from its
source rendering ``((n_end/n_start - 1)^(1/h))`` because that form is complex
for losses; standard geometric annualization is used instead.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict

import numpy as np

from .errors import DegenerateInputError, InsufficientDataError, ValidationError

TRADING_DAYS_PER_YEAR = 252

METRIC_KEYS = ("TR", "ARR", "SR", "SoR", "CR", "MDD", "Vol", "ENT", "ENB")


@dataclass(frozen=True)
class MetricsReport:
    """The nine-metric summary; None marks metrics whose input was degenerate."""

    TR: float | None
    ARR: float | None
    SR: float | None
    SoR: float | None
    CR: float | None
    MDD: float | None
    Vol: float | None
    ENT: float | None
    ENB: float | None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MetricsReport":
        obj = json.loads(text)
        return cls(**{k: obj[k] for k in METRIC_KEYS})


def _check_net_value(nv: np.ndarray) -> np.ndarray:
    nv = np.asarray(nv, dtype=float)
    if nv.ndim != 1:
        raise ValidationError("net value series must be one-dimensional")
    if np.any(nv <= 0):
        raise ValidationError("net value must be strictly positive")
    return nv


def returns_from_net_value(nv: np.ndarray) -> np.ndarray:
    nv = _check_net_value(nv)
    if len(nv) < 2:
        raise InsufficientDataError("need at least two points for returns")
    return nv[1:] / nv[:-1] - 1.0


def total_return(nv) -> float:
    """Percent change from the first to the last net value."""
    nv = _check_net_value(nv)
    if len(nv) < 2:
        raise InsufficientDataError("total return needs at least two points")
    return float((nv[-1] - nv[0]) / nv[0] * 100.0)


def annual_return_rate(nv, periods_per_year: int = TRADING_DAYS_PER_YEAR) -> float:
    """Geometric annualization of the whole-horizon growth, in percent."""
    nv = _check_net_value(nv)
    if len(nv) < 2:
        raise InsufficientDataError("annual return needs at least two points")
    horizon_periods = len(nv) - 1
    growth = nv[-1] / nv[0]
    return float((growth ** (periods_per_year / horizon_periods) - 1.0) * 100.0)


def sharpe(returns, risk_free: float = 0.0) -> float:
    """Mean excess return per unit of sample standard deviation."""
    r = np.asarray(returns, dtype=float)
    if len(r) < 2:
        raise InsufficientDataError("sharpe needs at least two returns")
    sd = float(np.std(r, ddof=1))
    if sd == 0.0:
        raise DegenerateInputError("sharpe undefined for zero-variance returns")
    return float((np.mean(r) - risk_free) / sd)


def sortino(returns, risk_free: float = 0.0) -> float:
    """Sharpe variant whose deviation is the sample std of negative returns only.

    When every negative return is identical the downside deviation is exactly
    zero; the 0/0 case with zero mean excess resolves to 0, any other
    numerator is degenerate.
    """
    r = np.asarray(returns, dtype=float)
    if len(r) < 2:
        raise InsufficientDataError("sortino needs at least two returns")
    downside = r[r < 0]
    if len(downside) < 2:
        raise DegenerateInputError("sortino undefined without at least two negative returns")
    sd = float(np.std(downside, ddof=1))
    excess = float(np.mean(r) - risk_free)
    if sd == 0.0:
        if excess == 0.0:
            return 0.0
        raise DegenerateInputError("sortino undefined for zero downside deviation")
    return excess / sd


def max_drawdown(nv) -> float:
    """Largest peak-to-trough decline, in percent of the peak."""
    nv = _check_net_value(nv)
    peaks = np.maximum.accumulate(nv)
    return float(np.max((peaks - nv) / peaks) * 100.0)


def volatility(returns) -> float:
    """Annualized standard deviation of returns, in percent."""
    r = np.asarray(returns, dtype=float)
    if len(r) < 2:
        raise InsufficientDataError("volatility needs at least two returns")
    return float(math.sqrt(TRADING_DAYS_PER_YEAR) * np.std(r, ddof=1) * 100.0)


def calmar(nv, periods_per_year: int = TRADING_DAYS_PER_YEAR) -> float:
    """Annualized return divided by maximum drawdown (both in percent)."""
    mdd = max_drawdown(nv)
    if mdd == 0.0:
        raise DegenerateInputError("calmar undefined with zero drawdown")
    return annual_return_rate(nv, periods_per_year) / mdd


def _check_weights(weights: np.ndarray) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.ndim == 1:
        w = w[None, :]
    if np.any(w < -1e-12):
        raise ValidationError("weights must be non-negative")
    sums = w.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > 1e-9):
        raise ValidationError("each weight vector must sum to 1 within 1e-9")
    return w


def entropy(weights) -> float:
    """Mean Shannon entropy of the weight vectors, in nats (0*ln0 = 0)."""
    w = _check_weights(weights)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(w > 0, w * np.log(w), 0.0)
    return float(np.mean(-terms.sum(axis=1)))


def enb(weights) -> float:
    """Mean of 1 / sum((p_i ln p_i)^2) over weight vectors (as-written form)."""
    w = _check_weights(weights)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(w > 0, w * np.log(w), 0.0)
    sums = (terms ** 2).sum(axis=1)
    if np.any(sums == 0.0):
        raise DegenerateInputError("enb undefined when all mass is on one asset")
    return float(np.mean(1.0 / sums))


def filter_invested(weights) -> np.ndarray | None:
    """Drop fully-concentrated weight vectors (e.g. the all-cash warm-up).

    Run-level diversity metrics are computed over days with at least one
    weight strictly inside (0,1); a run that never diversifies has no
    defined diversity. The strict entropy/enb functions are unaffected.
    """
    w = _check_weights(np.asarray(weights, dtype=float))
    mask = w.max(axis=1) < 1.0 - 1e-12
    if not mask.any():
        return None
    return w[mask]


def compute_report(nv, weights=None, risk_free: float = 0.0,
                   periods_per_year: int = TRADING_DAYS_PER_YEAR) -> MetricsReport:
    """All nine metrics; degenerate or short inputs yield None per metric."""
    values: dict[str, float | None] = {}

    def attempt(key, fn):
        try:
            values[key] = fn()
        except (DegenerateInputError, InsufficientDataError):
            values[key] = None

    nv = _check_net_value(np.asarray(nv, dtype=float))
    attempt("TR", lambda: total_return(nv))
    attempt("ARR", lambda: annual_return_rate(nv, periods_per_year))
    attempt("MDD", lambda: max_drawdown(nv))
    attempt("CR", lambda: calmar(nv, periods_per_year))
    if len(nv) >= 2:
        r = returns_from_net_value(nv)
        attempt("SR", lambda: sharpe(r, risk_free))
        attempt("SoR", lambda: sortino(r, risk_free))
        attempt("Vol", lambda: volatility(r))
    else:
        values["SR"] = values["SoR"] = values["Vol"] = None
    if weights is not None and len(weights) > 0:
        attempt("ENT", lambda: entropy(weights))
        attempt("ENB", lambda: enb(weights))
    else:
        values["ENT"] = values["ENB"] = None
    return MetricsReport(**values)
