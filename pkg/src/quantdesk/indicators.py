"""Technical indicator catalog: 60 named indicators behind one registry.

Every indicator is a pure function from aligned OHLCV arrays to one or more
named output series. Outputs align index-for-index with the input dates; the
warm-up prefix (insufficient lookback) is NaN, never zero-filled. Lookup is
case-insensitive; specs are addressable as strings, e.g. ``SMA(n=20)`` or
``MACD(fast=12,slow=26,signal=9)``.

Conventions, applied uniformly and noted per entry where they matter:

* "price" with no channel named means the close.
* EMA uses the smoothing weight ``1/(1+n)`` seeded at the first observation
  (this differs from the common ``2/(n+1)`` convention; all EMA-derived
  entries inherit it).
* Degenerate denominators resolve to a documented neutral value (RSV/WR 50
  matching midpoint, z-score 0) or stay undefined (NaN) where no neutral
  exists (CR, CCI, VWMA, MFI, CHOP).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from datetime import date as Date
from typing import Callable

import numpy as np

from .errors import ParameterError, RegistryError
from .marketdata import Bar

Arrays = dict[str, np.ndarray]


@dataclass(frozen=True)
class Series:
    """Values aligned to trading days; NaN marks undefined entries."""

    dates: tuple[Date, ...]
    values: np.ndarray

    def __post_init__(self):
        if len(self.dates) != len(self.values):
            raise ValueError("dates and values must align")

    @property
    def defined(self) -> np.ndarray:
        return ~np.isnan(self.values)

    def last_defined(self) -> float | None:
        idx = np.flatnonzero(self.defined)
        if idx.size == 0:
            return None
        return float(self.values[idx[-1]])


@dataclass(frozen=True)
class IndicatorSpec:
    """A catalog name plus concrete parameter values."""

    name: str
    params: dict = field(default_factory=dict)

    def canonical(self) -> str:
        entry = _lookup(self.name)
        merged = {**entry.defaults, **self.params}
        inner = ",".join(f"{k}={merged[k]}" for k in entry.defaults)
        return f"{entry.name}({inner})"

    def __hash__(self):
        return hash(self.canonical())

    def __eq__(self, other):
        return isinstance(other, IndicatorSpec) and self.canonical() == other.canonical()


# ---------------------------------------------------------------------------
# rolling primitives
# ---------------------------------------------------------------------------

def _shifted(x: np.ndarray, lag: int) -> np.ndarray:
    out = np.full_like(x, np.nan)
    if lag < len(x):
        out[lag:] = x[: len(x) - lag]
    return out


def _windows(x: np.ndarray, n: int) -> np.ndarray:
    return np.lib.stride_tricks.sliding_window_view(x, n)


def _first_valid(x: np.ndarray) -> int:
    idx = np.flatnonzero(~np.isnan(x))
    return int(idx[0]) if idx.size else len(x)


def _roll(x: np.ndarray, n: int, op: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply op over trailing windows of n, honoring a NaN warm-up prefix."""
    out = np.full(len(x), np.nan)
    f = _first_valid(x)
    if len(x) - f >= n:
        out[f + n - 1:] = op(_windows(x[f:], n))
    return out


def _rmean(x, n):
    return _roll(x, n, lambda w: w.mean(axis=1))


def _rsum(x, n):
    return _roll(x, n, lambda w: w.sum(axis=1))


def _rstd(x, n):
    return _roll(x, n, lambda w: w.std(axis=1, ddof=1))


def _rvar(x, n):
    return _roll(x, n, lambda w: w.var(axis=1, ddof=1))


def _rmax(x, n):
    return _roll(x, n, lambda w: w.max(axis=1))


def _rmin(x, n):
    return _roll(x, n, lambda w: w.min(axis=1))


def _ema(x: np.ndarray, n: int) -> np.ndarray:
    """Recursive average with weight 1/(1+n), seeded at the first value."""
    out = np.full(len(x), np.nan)
    f = _first_valid(x)
    if f >= len(x):
        return out
    alpha = 1.0 / (1.0 + n)
    acc = x[f]
    out[f] = acc
    for i in range(f + 1, len(x)):
        acc = acc + alpha * (x[i] - acc)
        out[i] = acc
    return out


def _true_range(a: Arrays) -> np.ndarray:
    high, low, close = a["high"], a["low"], a["close"]
    prev = _shifted(close, 1)
    out = np.full(len(close), np.nan)
    out[1:] = np.maximum.reduce([
        high[1:] - low[1:],
        np.abs(high[1:] - prev[1:]),
        np.abs(low[1:] - prev[1:]),
    ])
    return out


def _up_down_volume(a: Arrays, n: int) -> tuple[np.ndarray, np.ndarray]:
    close, volume = a["close"], a["volume"]
    diff = np.diff(close)
    up = np.where(diff > 0, volume[1:], 0.0)
    down = np.where(diff < 0, volume[1:], 0.0)
    pad = np.full(len(close), np.nan)
    up_s, down_s = pad.copy(), pad.copy()
    up_s[1:], down_s[1:] = up, down
    return _rsum(up_s, n), _rsum(down_s, n)


def _safe_div(num: np.ndarray, den: np.ndarray, neutral: float | None = None) -> np.ndarray:
    out = np.full(len(num), np.nan)
    with np.errstate(invalid="ignore", divide="ignore"):
        good = den != 0
        out[good] = num[good] / den[good]
    if neutral is not None:
        zero = (den == 0) & ~np.isnan(num)
        out[zero] = neutral
    return out


def _rsi(close: np.ndarray, n: int) -> np.ndarray:
    """Mean-gain/mean-loss oscillator; zero losses pin to 100, zero gains to 0."""
    diff = np.diff(close)
    gains = np.where(diff > 0, diff, 0.0)
    losses = np.where(diff < 0, -diff, 0.0)
    pad = np.full(len(close), np.nan)
    g, l = pad.copy(), pad.copy()
    g[1:], l[1:] = gains, losses
    avg_gain = _rmean(g, n)
    avg_loss = _rmean(l, n)
    out = np.full(len(close), np.nan)
    defined = ~np.isnan(avg_gain)
    for i in np.flatnonzero(defined):
        if avg_loss[i] == 0.0:
            out[i] = 100.0
        elif avg_gain[i] == 0.0:
            out[i] = 0.0
        else:
            out[i] = 100.0 - 100.0 / (1.0 + avg_gain[i] / avg_loss[i])
    return out


def _rsv(a: Arrays, n: int) -> np.ndarray:
    hh = _rmax(a["high"], n)
    ll = _rmin(a["low"], n)
    return _safe_div((a["close"] - ll) * 100.0, hh - ll, neutral=50.0)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogEntry:
    name: str
    lines: tuple[str, ...]
    defaults: dict
    inputs: tuple[str, ...]
    fn: Callable[[Arrays, dict], dict[str, np.ndarray]]
    domains: dict = field(default_factory=dict)
    bounded_lookback: bool = True  # False for recursive (infinite-memory) forms
    noncausal_lines: frozenset = frozenset()
    note: str = ""


_REGISTRY: dict[str, CatalogEntry] = {}


def _register(name, lines, defaults, inputs, domains=None, bounded=True,
              noncausal_lines=(), note=""):
    def wrap(fn):
        _REGISTRY[name] = CatalogEntry(
            name=name,
            lines=tuple(lines),
            defaults=dict(defaults),
            inputs=tuple(inputs),
            fn=fn,
            domains=domains or {},
            bounded_lookback=bounded,
            noncausal_lines=frozenset(noncausal_lines),
            note=note,
        )
        return fn
    return wrap


def _lookup(name: str) -> CatalogEntry:
    entry = _REGISTRY.get(name.upper())
    if entry is None:
        raise RegistryError(f"unknown indicator {name!r}")
    return entry


def _pos_int(v):
    return isinstance(v, int) and not isinstance(v, bool) and v >= 1


def _min_int(floor):
    return lambda v: isinstance(v, int) and not isinstance(v, bool) and v >= floor


def _pos_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0


def _choice(*options):
    return lambda v: v in options


CHANNELS = ("open", "high", "low", "close", "volume")


def _validate_params(entry: CatalogEntry, params: dict) -> dict:
    merged = dict(entry.defaults)
    for key, value in params.items():
        if key not in entry.defaults:
            raise ParameterError(f"{entry.name}: unknown parameter {key!r}")
        if isinstance(entry.defaults[key], int) and isinstance(value, float) and value.is_integer():
            value = int(value)
        merged[key] = value
    for key, check in entry.domains.items():
        if not check(merged[key]):
            raise ParameterError(f"{entry.name}: parameter {key}={merged[key]!r} out of domain")
    return merged


# --- catalog entries -------------------------------------------------------

@_register("DELTA", ["delta"], {"n": 1}, ["close"], {"n": _pos_int},
           note="n-period first difference of the close (documented interpretation)")
def _ind_delta(a, p):
    c = a["close"]
    return {"delta": c - _shifted(c, p["n"])}


@_register("PERM", ["perm"], {"n": 10}, ["close"], {"n": _pos_int},
           note="zero-based rank of the latest close within the trailing window "
                "(count of strictly smaller window values; documented interpretation)")
def _ind_perm(a, p):
    c, n = a["close"], p["n"]
    out = np.full(len(c), np.nan)
    if len(c) >= n:
        w = _windows(c, n)
        out[n - 1:] = (w < w[:, -1:]).sum(axis=1)
    return {"perm": out}


@_register("LOGRET", ["logret"], {"n": 1}, ["close"], {"n": _pos_int})
def _ind_logret(a, p):
    c = a["close"]
    return {"logret": np.log(_safe_div(c, _shifted(c, p["n"])))}


@_register("MAX", ["max"], {"n": 10, "channel": "close"}, ["close", "high", "low", "open", "volume"],
           {"n": _pos_int, "channel": _choice(*CHANNELS)},
           note="rolling maximum; channel selectable, close by default")
def _ind_max(a, p):
    return {"max": _rmax(a[p["channel"]], p["n"])}


@_register("MIN", ["min"], {"n": 10, "channel": "close"}, ["close", "high", "low", "open", "volume"],
           {"n": _pos_int, "channel": _choice(*CHANNELS)})
def _ind_min(a, p):
    return {"min": _rmin(a[p["channel"]], p["n"])}


@_register("MIDDLE", ["middle"], {}, ["close", "high", "low"])
def _ind_middle(a, p):
    return {"middle": (a["close"] + a["high"] + a["low"]) / 3.0}


_COMPARE_OPS = {
    "le": np.less_equal, "ge": np.greater_equal, "lt": np.less,
    "gt": np.greater, "eq": np.equal, "ne": np.not_equal,
}


@_register("COMPARE", ["compare"], {"op": "gt", "channel": "close", "lag": 1},
           ["close", "high", "low", "open", "volume"],
           {"op": _choice(*_COMPARE_OPS), "channel": _choice(*CHANNELS), "lag": _pos_int},
           note="1.0 where the channel relates to its lagged value under op, else 0.0")
def _ind_compare(a, p):
    x = a[p["channel"]]
    prev = _shifted(x, p["lag"])
    out = np.full(len(x), np.nan)
    good = ~np.isnan(prev)
    out[good] = _COMPARE_OPS[p["op"]](x[good], prev[good]).astype(float)
    return {"compare": out}


@_register("COUNT", ["count"], {"n": 10, "direction": "backward"}, ["close"],
           {"n": _pos_int, "direction": _choice("backward", "forward")},
           note="number of up-moves (close above previous close) among n moves, "
                "looking backward or forward from each index; the forward "
                "direction reads ahead and is gated out of strategy use")
def _ind_count(a, p):
    c, n = a["close"], p["n"]
    up = np.full(len(c), np.nan)
    up[1:] = (np.diff(c) > 0).astype(float)
    if p["direction"] == "backward":
        return {"count": _rsum(up, n)}
    out = np.full(len(c), np.nan)
    if len(c) - 1 >= n:
        w = _windows(up[1:], n)  # moves ending at i+1 .. i+n
        out[: len(c) - n] = w.sum(axis=1)
    return {"count": out}


@_register("CROSS", ["cross"], {"fast": 5, "slow": 20, "direction": "up"}, ["close"],
           {"fast": _pos_int, "slow": _pos_int, "direction": _choice("up", "down")},
           note="1.0 on the bar where SMA(fast) crosses SMA(slow) in the given direction")
def _ind_cross(a, p):
    fast = _rmean(a["close"], p["fast"])
    slow = _rmean(a["close"], p["slow"])
    out = np.full(len(fast), np.nan)
    good = ~np.isnan(fast) & ~np.isnan(slow)
    good[1:] &= good[:-1]
    good[0] = False
    idx = np.flatnonzero(good)
    for i in idx:
        if p["direction"] == "up":
            out[i] = float(fast[i - 1] <= slow[i - 1] and fast[i] > slow[i])
        else:
            out[i] = float(fast[i - 1] >= slow[i - 1] and fast[i] < slow[i])
    return {"cross": out}


@_register("SMA", ["sma"], {"n": 20, "channel": "close"}, ["close", "high", "low", "open", "volume"],
           {"n": _pos_int, "channel": _choice(*CHANNELS)})
def _ind_sma(a, p):
    return {"sma": _rmean(a[p["channel"]], p["n"])}


@_register("EMA", ["ema"], {"n": 20, "channel": "close"}, ["close", "high", "low", "open", "volume"],
           {"n": _pos_int, "channel": _choice(*CHANNELS)}, bounded=False,
           note="recursive weight 1/(1+n) seeded at the first value "
                "(differs from the common 2/(n+1) convention)")
def _ind_ema(a, p):
    return {"ema": _ema(a[p["channel"]], p["n"])}


@_register("MSTD", ["mstd"], {"n": 20, "channel": "close"}, ["close", "high", "low", "open", "volume"],
           {"n": _min_int(2), "channel": _choice(*CHANNELS)})
def _ind_mstd(a, p):
    return {"mstd": _rstd(a[p["channel"]], p["n"])}


@_register("MVAR", ["mvar"], {"n": 20, "channel": "close"}, ["close", "high", "low", "open", "volume"],
           {"n": _min_int(2), "channel": _choice(*CHANNELS)})
def _ind_mvar(a, p):
    return {"mvar": _rvar(a[p["channel"]], p["n"])}


@_register("RSV", ["rsv"], {"n": 9}, ["close", "high", "low"], {"n": _pos_int},
           note="stochastic raw value in [0,100]; zero high-low range maps to 50")
def _ind_rsv(a, p):
    return {"rsv": _rsv(a, p["n"])}


@_register("RSI", ["rsi"], {"n": 14}, ["close"], {"n": _pos_int},
           note="simple-mean gains/losses; zero average loss pins to 100, zero gain to 0")
def _ind_rsi(a, p):
    return {"rsi": _rsi(a["close"], p["n"])}


@_register("KDJ", ["k", "d", "j"], {"n": 9, "smooth": 3}, ["close", "high", "low"],
           {"n": _pos_int, "smooth": _pos_int})
def _ind_kdj(a, p):
    k = _rmean(_rsv(a, p["n"]), p["smooth"])
    d = _rmean(k, p["smooth"])
    return {"k": k, "d": d, "j": 3.0 * k - 2.0 * d}


@_register("BOLL", ["upper", "middle", "lower"], {"n": 20, "k": 2.0, "channel": "close"},
           ["close", "high", "low", "open", "volume"],
           {"n": _min_int(2), "k": _pos_num, "channel": _choice(*CHANNELS)})
def _ind_boll(a, p):
    mid = _rmean(a[p["channel"]], p["n"])
    band = p["k"] * _rstd(a[p["channel"]], p["n"])
    return {"upper": mid + band, "middle": mid, "lower": mid - band}


@_register("MACD", ["macd", "signal", "hist"], {"fast": 12, "slow": 26, "signal": 9},
           ["close"], {"fast": _pos_int, "slow": _pos_int, "signal": _pos_int}, bounded=False)
def _ind_macd(a, p):
    if p["fast"] >= p["slow"]:
        raise ParameterError("MACD: fast must be below slow")
    line = _ema(a["close"], p["fast"]) - _ema(a["close"], p["slow"])
    signal = _ema(line, p["signal"])
    return {"macd": line, "signal": signal, "hist": line - signal}


@_register("CR", ["cr"], {"n": 26}, ["close", "high", "low"], {"n": _pos_int},
           note="window sum of middle prices over window sum of high-low ranges, "
                "as rendered in the catalog source; undefined when ranges sum to zero")
def _ind_cr(a, p):
    mid = (a["close"] + a["high"] + a["low"]) / 3.0
    rng = a["high"] - a["low"]
    return {"cr": _safe_div(_rsum(mid, p["n"]), _rsum(rng, p["n"]))}


@_register("WR", ["wr"], {"n": 14}, ["close", "high", "low"], {"n": _pos_int},
           note="in [-100,0]; zero range maps to -50")
def _ind_wr(a, p):
    hh = _rmax(a["high"], p["n"])
    ll = _rmin(a["low"], p["n"])
    return {"wr": _safe_div((hh - a["close"]) * -100.0, hh - ll, neutral=-50.0)}


@_register("CCI", ["cci"], {"n": 20}, ["close"], {"n": _min_int(2)},
           note="0.015*(close-SMA)/mean-deviation, keeping the source's scale "
                "(conventional CCI divides by 0.015*MD instead); undefined when MD=0")
def _ind_cci(a, p):
    c, n = a["close"], p["n"]
    sma = _rmean(c, n)
    out = np.full(len(c), np.nan)
    if len(c) >= n:
        w = _windows(c, n)
        md = np.abs(w - sma[n - 1:, None]).mean(axis=1)
        good = md != 0
        vals = np.full(len(md), np.nan)
        vals[good] = 0.015 * (c[n - 1:][good] - sma[n - 1:][good]) / md[good]
        out[n - 1:] = vals
    return {"cci": out}


@_register("TR", ["tr"], {}, ["close", "high", "low"])
def _ind_tr(a, p):
    return {"tr": _true_range(a)}


@_register("ATR", ["atr"], {"n": 14}, ["close", "high", "low"], {"n": _pos_int},
           note="simple moving average of the true range")
def _ind_atr(a, p):
    return {"atr": _rmean(_true_range(a), p["n"])}


@_register("DMA", ["dma"], {"fast": 10, "slow": 50}, ["close"],
           {"fast": _pos_int, "slow": _pos_int})
def _ind_dma(a, p):
    c = a["close"]
    return {"dma": _rmean(c, p["fast"]) - _rmean(c, p["slow"])}


def _directional(a: Arrays, n: int) -> tuple[np.ndarray, np.ndarray]:
    tr = _true_range(a)
    ll = _rmin(a["low"], n)
    pdi = _safe_div(a["high"] - ll, tr)
    mdi = _safe_div(ll - a["low"], tr)
    return pdi, mdi


def _adx_from_di(pdi: np.ndarray, mdi: np.ndarray, n: int) -> np.ndarray:
    denom = np.abs(pdi) + np.abs(mdi)
    dx = np.full(len(pdi), np.nan)
    good = ~np.isnan(pdi) & ~np.isnan(mdi)
    safe = np.where(denom == 0, 1.0, denom)
    dx[good] = np.where(denom[good] == 0, 0.0,
                        100.0 * np.abs(pdi - mdi)[good] / safe[good])
    out = np.full(len(pdi), np.nan)
    f = _first_valid(dx)
    if f < len(dx):
        acc = dx[f]
        out[f] = acc
        for i in range(f + 1, len(dx)):
            acc = (n * acc + dx[i]) / (n + 1.0)
            out[i] = acc
    return out


def _smooth_half(x: np.ndarray) -> np.ndarray:
    out = np.full(len(x), np.nan)
    f = _first_valid(x)
    if f < len(x):
        acc = x[f]
        out[f] = acc
        for i in range(f + 1, len(x)):
            acc = (x[i] + acc) / 2.0
            out[i] = acc
    return out


@_register("PDI", ["pdi"], {"n": 14}, ["close", "high", "low"], {"n": _pos_int},
           note="(high - lowest low over n)/true range, as rendered in the catalog source")
def _ind_pdi(a, p):
    pdi, _ = _directional(a, p["n"])
    return {"pdi": pdi}


@_register("MDI", ["mdi"], {"n": 14}, ["close", "high", "low"], {"n": _pos_int},
           note="(lowest low over n - low)/true range, as rendered in the catalog source")
def _ind_mdi(a, p):
    _, mdi = _directional(a, p["n"])
    return {"mdi": mdi}


@_register("ADX", ["adx"], {"n": 14}, ["close", "high", "low"], {"n": _pos_int}, bounded=False,
           note="DX = 100*|PDI-MDI|/(|PDI|+|MDI|), smoothed by adx = (n*prev + dx)/(n+1); "
                "the source's self-referential rendering is read as this recurrence")
def _ind_adx(a, p):
    pdi, mdi = _directional(a, p["n"])
    return {"adx": _adx_from_di(pdi, mdi, p["n"])}


@_register("ADXR", ["adxr"], {"n": 14}, ["close", "high", "low"], {"n": _pos_int}, bounded=False,
           note="adxr = (adx + previous adxr)/2, seeded at the first ADX value")
def _ind_adxr(a, p):
    pdi, mdi = _directional(a, p["n"])
    return {"adxr": _smooth_half(_adx_from_di(pdi, mdi, p["n"]))}


@_register("DMI", ["pdi", "mdi", "adx", "adxr"], {"n": 14}, ["close", "high", "low"],
           {"n": _pos_int}, bounded=False)
def _ind_dmi(a, p):
    pdi, mdi = _directional(a, p["n"])
    adx = _adx_from_di(pdi, mdi, p["n"])
    return {"pdi": pdi, "mdi": mdi, "adx": adx, "adxr": _smooth_half(adx)}


@_register("TRIX", ["trix"], {"n": 15}, ["close"], {"n": _pos_int}, bounded=False,
           note="one-period relative change of the triple EMA")
def _ind_trix(a, p):
    t = _ema(_ema(_ema(a["close"], p["n"]), p["n"]), p["n"])
    prev = _shifted(t, 1)
    return {"trix": _safe_div(t - prev, prev)}


@_register("TEMA", ["tema"], {"n": 10}, ["close"], {"n": _pos_int}, bounded=False)
def _ind_tema(a, p):
    e1 = _ema(a["close"], p["n"])
    e2 = _ema(e1, p["n"])
    e3 = _ema(e2, p["n"])
    return {"tema": 3.0 * e1 - 3.0 * e2 + e3}


@_register("VR", ["vr"], {"n": 26}, ["close", "volume"], {"n": _pos_int},
           note="(up-volume - down-volume)/(up-volume + down-volume)*100 over the window; "
                "0 when the window has no directional volume")
def _ind_vr(a, p):
    up, down = _up_down_volume(a, p["n"])
    return {"vr": _safe_div((up - down) * 100.0, up + down, neutral=0.0)}


@_register("MFI", ["mfi"], {"n": 14}, ["close", "high", "low", "volume"], {"n": _pos_int},
           note="money flow (middle*volume) over its window mean, *100, "
                "as rendered in the catalog source")
def _ind_mfi(a, p):
    flow = (a["close"] + a["high"] + a["low"]) / 3.0 * a["volume"]
    return {"mfi": _safe_div(flow * 100.0, _rmean(flow, p["n"]))}


@_register("VWMA", ["vwma"], {"n": 20}, ["close", "volume"], {"n": _pos_int})
def _ind_vwma(a, p):
    pv = _rsum(a["close"] * a["volume"], p["n"])
    v = _rsum(a["volume"], p["n"])
    return {"vwma": _safe_div(pv, v)}


@_register("CHOP", ["chop"], {"n": 14}, ["close", "high", "low"], {"n": _min_int(2)},
           note="choppiness index 100*log10(sum TR / (max high - min low))/log10(n); "
                "the source gives prose only, so the published formula is used")
def _ind_chop(a, p):
    n = p["n"]
    tr_sum = _rsum(_true_range(a), n)
    rng = _rmax(a["high"], n) - _rmin(a["low"], n)
    ratio = _safe_div(tr_sum, rng)
    out = np.full(len(ratio), np.nan)
    good = ~np.isnan(ratio) & (ratio > 0)
    out[good] = 100.0 * np.log10(ratio[good]) / math.log10(n)
    return {"chop": out}


@_register("KER", ["ker"], {}, ["high", "low"],
           note="(high - low)/high per bar, as rendered in the catalog source")
def _ind_ker(a, p):
    return {"ker": (a["high"] - a["low"]) / a["high"]}


@_register("KAMA", ["kama"], {"n": 10, "fast": 2, "slow": 30}, ["close"],
           {"n": _pos_int, "fast": _pos_int, "slow": _pos_int}, bounded=False,
           note="Kaufman adaptive MA with efficiency ratio |c_i - c_{i-n}| / sum|diff|; "
                "the source's rendering omits the price term, so the published "
                "definition is used, seeded at the first computable index")
def _ind_kama(a, p):
    c, n = a["close"], p["n"]
    out = np.full(len(c), np.nan)
    if len(c) <= n:
        return {"kama": out}
    fastest = 2.0 / (p["fast"] + 1.0)
    slowest = 2.0 / (p["slow"] + 1.0)
    abs_diff = np.abs(np.diff(c))
    acc = c[n]
    out[n] = acc
    for i in range(n + 1, len(c)):
        vol = abs_diff[i - n: i].sum()
        er = abs(c[i] - c[i - n]) / vol if vol > 0 else 0.0
        sc = (er * (fastest - slowest) + slowest) ** 2
        acc = acc + sc * (c[i] - acc)
        out[i] = acc
    return {"kama": out}


@_register("PPO", ["ppo"], {"fast": 12, "slow": 26}, ["close"],
           {"fast": _pos_int, "slow": _pos_int}, bounded=False)
def _ind_ppo(a, p):
    if p["fast"] >= p["slow"]:
        raise ParameterError("PPO: fast must be below slow")
    ef = _ema(a["close"], p["fast"])
    es = _ema(a["close"], p["slow"])
    return {"ppo": _safe_div((ef - es) * 100.0, es)}


@_register("STOCHRSI", ["k", "d"], {"n": 14, "stoch": 14, "smooth": 3}, ["close"],
           {"n": _pos_int, "stoch": _pos_int, "smooth": _pos_int},
           note="stochastic of RSI in [0,100]; flat RSI window maps to 50")
def _ind_stochrsi(a, p):
    rsi = _rsi(a["close"], p["n"])
    mn = _rmin(rsi, p["stoch"])
    mx = _rmax(rsi, p["stoch"])
    k = _safe_div((rsi - mn) * 100.0, mx - mn, neutral=50.0)
    return {"k": k, "d": _rmean(k, p["smooth"])}


@_register("WT", ["wt1", "wt2"], {"n1": 10, "n2": 21}, ["close", "high", "low"],
           {"n1": _pos_int, "n2": _pos_int}, bounded=False,
           note="wave trend: ci = (hlc3 - EMA)/(0.015*EMA|dev|), wt1 = EMA(ci), "
                "wt2 = SMA(wt1, 4); the source names it without a formula, so the "
                "published two-line definition is used with the catalog EMA")
def _ind_wt(a, p):
    ap = (a["close"] + a["high"] + a["low"]) / 3.0
    esa = _ema(ap, p["n1"])
    dev = _ema(np.abs(ap - esa), p["n1"])
    ci = _safe_div(ap - esa, 0.015 * dev, neutral=0.0)
    wt1 = _ema(ci, p["n2"])
    return {"wt1": wt1, "wt2": _rmean(wt1, 4)}


@_register("SUPERTREND", ["upper", "lower", "direction"], {"n": 14, "mult": 3.0},
           ["close", "high", "low"], {"n": _pos_int, "mult": _pos_num}, bounded=False,
           note="bands previous close +/- mult*ATR; direction starts up and flips "
                "when the close touches the active band (lower in an uptrend, "
                "upper in a downtrend)")
def _ind_supertrend(a, p):
    c = a["close"]
    atr = _rmean(_true_range(a), p["n"])
    prev = _shifted(c, 1)
    upper = prev + p["mult"] * atr
    lower = prev - p["mult"] * atr
    direction = np.full(len(c), np.nan)
    state = 1.0
    for i in np.flatnonzero(~np.isnan(upper)):
        if state > 0 and c[i] <= lower[i]:
            state = -1.0
        elif state < 0 and c[i] >= upper[i]:
            state = 1.0
        direction[i] = state
    return {"upper": upper, "lower": lower, "direction": direction}


@_register("AROON", ["up", "down", "osc"], {"n": 25}, ["high", "low"], {"n": _pos_int})
def _ind_aroon(a, p):
    n = p["n"]
    high, low = a["high"], a["low"]
    up = np.full(len(high), np.nan)
    down = np.full(len(high), np.nan)
    if len(high) > n:
        hw = _windows(high, n + 1)
        lw = _windows(low, n + 1)
        # distance (in bars) back to the extreme; argmax picks the earliest on ties
        since_high = n - hw.argmax(axis=1)
        since_low = n - lw.argmin(axis=1)
        up[n:] = 100.0 * (n - since_high) / n
        down[n:] = 100.0 * (n - since_low) / n
    return {"up": up, "down": down, "osc": up - down}


@_register("ZSCORE", ["zscore"], {"n": 20}, ["close"], {"n": _min_int(2)},
           note="(close - window mean)/window sample std; zero std maps to 0")
def _ind_zscore(a, p):
    c = a["close"]
    mean = _rmean(c, p["n"])
    std = _rstd(c, p["n"])
    return {"zscore": _safe_div(c - mean, std, neutral=0.0)}


@_register("AO", ["ao"], {"fast": 5, "slow": 34}, ["close"],
           {"fast": _pos_int, "slow": _pos_int},
           note="SMA(fast) - SMA(slow) of the close (the source names no channel)")
def _ind_ao(a, p):
    c = a["close"]
    return {"ao": _rmean(c, p["fast"]) - _rmean(c, p["slow"])}


@_register("BOP", ["bop"], {}, ["close", "open", "high", "low", "volume"],
           note="(close-open)/(high-low)*volume per bar; zero range maps to 0")
def _ind_bop(a, p):
    base = _safe_div(a["close"] - a["open"], a["high"] - a["low"], neutral=0.0)
    return {"bop": base * a["volume"]}


@_register("MAD", ["mad"], {"n": 20}, ["close"], {"n": _pos_int})
def _ind_mad(a, p):
    c, n = a["close"], p["n"]
    out = np.full(len(c), np.nan)
    if len(c) >= n:
        w = _windows(c, n)
        out[n - 1:] = np.abs(w - w.mean(axis=1, keepdims=True)).mean(axis=1)
    return {"mad": out}


@_register("ROC", ["roc"], {"n": 10}, ["close"], {"n": _pos_int})
def _ind_roc(a, p):
    c = a["close"]
    prev = _shifted(c, p["n"])
    return {"roc": _safe_div((c - prev) * 100.0, prev)}


@_register("COPPOCK", ["coppock"], {"r1": 14, "r2": 11, "weight": 0.15}, ["close"],
           {"r1": _pos_int, "r2": _pos_int, "weight": _pos_num},
           note="(ROC(r1) + weight*ROC(r2))/(1 + weight), as rendered in the catalog "
                "source (no trailing smoothing)")
def _ind_coppock(a, p):
    c = a["close"]
    r1 = _safe_div((c - _shifted(c, p["r1"])) * 100.0, _shifted(c, p["r1"]))
    r2 = _safe_div((c - _shifted(c, p["r2"])) * 100.0, _shifted(c, p["r2"]))
    return {"coppock": (r1 + p["weight"] * r2) / (1.0 + p["weight"])}


@_register("ICHIMOKU", ["tenkan", "kijun", "senkou_a", "senkou_b", "chikou"],
           {"tenkan": 9, "kijun": 26, "span_b": 52}, ["close", "high", "low"],
           {"tenkan": _pos_int, "kijun": _pos_int, "span_b": _pos_int},
           noncausal_lines=("chikou",),
           note="standard midpoint lines ((highest high + lowest low)/2); the source's "
                "SMA-sum rendering is typeset inconsistently, so the published "
                "definition is used. senkou lines are displaced forward by the kijun "
                "period; chikou is the close displaced back (reads ahead)")
def _ind_ichimoku(a, p):
    high, low, close = a["high"], a["low"], a["close"]
    tenkan = (_rmax(high, p["tenkan"]) + _rmin(low, p["tenkan"])) / 2.0
    kijun = (_rmax(high, p["kijun"]) + _rmin(low, p["kijun"])) / 2.0
    span_raw = (tenkan + kijun) / 2.0
    span_b_raw = (_rmax(high, p["span_b"]) + _rmin(low, p["span_b"])) / 2.0
    shift = p["kijun"]
    senkou_a = _shifted(span_raw, shift)
    senkou_b = _shifted(span_b_raw, shift)
    chikou = np.full(len(close), np.nan)
    if shift < len(close):
        chikou[: len(close) - shift] = close[shift:]
    return {"tenkan": tenkan, "kijun": kijun, "senkou_a": senkou_a,
            "senkou_b": senkou_b, "chikou": chikou}


@_register("CTI", ["cti"], {"fast": 10, "slow": 20}, ["close"],
           {"fast": _pos_int, "slow": _pos_int},
           note="(SMA(fast) - SMA(slow))/(SMA(fast) + SMA(slow))")
def _ind_cti(a, p):
    f = _rmean(a["close"], p["fast"])
    s = _rmean(a["close"], p["slow"])
    return {"cti": _safe_div(f - s, f + s)}


@_register("LRMA", ["lrma"], {"n": 14}, ["close"], {"n": _min_int(2)},
           note="least-squares line over the window, evaluated at the window end")
def _ind_lrma(a, p):
    c, n = a["close"], p["n"]
    out = np.full(len(c), np.nan)
    if len(c) >= n:
        t = np.arange(n, dtype=float)
        t_mean = t.mean()
        t_var = ((t - t_mean) ** 2).sum()
        w = _windows(c, n)
        y_mean = w.mean(axis=1)
        slope = ((t - t_mean) * (w - y_mean[:, None])).sum(axis=1) / t_var
        out[n - 1:] = y_mean + slope * (n - 1 - t_mean)
    return {"lrma": out}


@_register("ERI", ["bull", "bear"], {}, ["close", "high", "low"],
           note="bull=(H+L+C)/3, bear=(H+L-C)/3, as rendered in the catalog source")
def _ind_eri(a, p):
    s = a["high"] + a["low"]
    return {"bull": (s + a["close"]) / 3.0, "bear": (s - a["close"]) / 3.0}


@_register("FTR", ["ftr"], {}, ["high", "low"],
           note="ln((high+low)/2) per bar, as rendered in the catalog source")
def _ind_ftr(a, p):
    return {"ftr": np.log((a["high"] + a["low"]) / 2.0)}


@_register("RVGI", ["rvgi"], {"fast": 10, "slow": 20}, ["close"],
           {"fast": _pos_int, "slow": _pos_int},
           note="(SMA(fast) - SMA(slow))/SMA(slow)*100, as rendered in the catalog source")
def _ind_rvgi(a, p):
    f = _rmean(a["close"], p["fast"])
    s = _rmean(a["close"], p["slow"])
    return {"rvgi": _safe_div((f - s) * 100.0, s)}


@_register("INERTIA", ["inertia"], {}, ["close"],
           note="one-period percent change of the close, as rendered in the catalog source")
def _ind_inertia(a, p):
    c = a["close"]
    prev = _shifted(c, 1)
    return {"inertia": _safe_div((c - prev) * 100.0, prev)}


@_register("KST", ["kst"], {"r1": 10, "r2": 15, "r3": 20, "r4": 30,
                            "s1": 10, "s2": 10, "s3": 10, "s4": 15}, ["close"],
           {k: _pos_int for k in ("r1", "r2", "r3", "r4", "s1", "s2", "s3", "s4")},
           note="unweighted sum of four smoothed rate-of-change terms "
                "SMA(ROC(r_k), s_k); the source renders KST as a four-term sum, "
                "concretized with the published component periods")
def _ind_kst(a, p):
    c = a["close"]
    total = None
    for r_key, s_key in (("r1", "s1"), ("r2", "s2"), ("r3", "s3"), ("r4", "s4")):
        prev = _shifted(c, p[r_key])
        roc = _safe_div((c - prev) * 100.0, prev)
        term = _rmean(roc, p[s_key])
        total = term if total is None else total + term
    return {"kst": total}


@_register("PGO", ["pgo"], {"n": 14}, ["close"], {"n": _pos_int},
           note="close minus SMA(n), as rendered in the catalog source")
def _ind_pgo(a, p):
    return {"pgo": a["close"] - _rmean(a["close"], p["n"])}


@_register("PSL", ["psl"], {"n": 12}, ["close"], {"n": _pos_int},
           note="percentage of up-closes over the last n moves")
def _ind_psl(a, p):
    c, n = a["close"], p["n"]
    up = np.full(len(c), np.nan)
    up[1:] = (np.diff(c) > 0).astype(float)
    return {"psl": _rmean(up, n) * 100.0}


@_register("PVO", ["pvo"], {"n": 12}, ["close", "volume"], {"n": _pos_int},
           note="(up-volume - down-volume)/(up-volume + down-volume)*100; the source "
                "renders PVO with the same formula as VR, differing only in window")
def _ind_pvo(a, p):
    up, down = _up_down_volume(a, p["n"])
    return {"pvo": _safe_div((up - down) * 100.0, up + down, neutral=0.0)}


@_register("QQE", ["rsima", "qqe"], {"n": 14, "smooth": 5, "factor": 4.236}, ["close"],
           {"n": _pos_int, "smooth": _pos_int, "factor": _pos_num}, bounded=False,
           note="smoothed RSI with a volatility-trailing line: rsima = EMA(RSI(n), smooth); "
                "dar = EMA(EMA(|diff rsima|, 2n-1), 2n-1)*factor; the qqe line trails "
                "rsima by dar, ratcheting until crossed (published definition; the "
                "source gives prose only)")
def _ind_qqe(a, p):
    rsima = _ema(_rsi(a["close"], p["n"]), p["smooth"])
    diff = np.abs(rsima - _shifted(rsima, 1))
    w = 2 * p["n"] - 1
    dar = _ema(_ema(diff, w), w) * p["factor"]
    qqe = np.full(len(rsima), np.nan)
    start = _first_valid(dar)
    if start >= len(rsima):
        return {"rsima": rsima, "qqe": qqe}
    longband = rsima[start] - dar[start]
    shortband = rsima[start] + dar[start]
    trend = 1
    qqe[start] = longband
    for i in range(start + 1, len(rsima)):
        new_long = rsima[i] - dar[i]
        new_short = rsima[i] + dar[i]
        if rsima[i - 1] > longband and rsima[i] > longband:
            longband = max(longband, new_long)
        else:
            longband = new_long
        if rsima[i - 1] < shortband and rsima[i] < shortband:
            shortband = min(shortband, new_short)
        else:
            shortband = new_short
        if trend == 1 and rsima[i] < longband:
            trend = -1
        elif trend == -1 and rsima[i] > shortband:
            trend = 1
        qqe[i] = longband if trend == 1 else shortband
    return {"rsima": rsima, "qqe": qqe}


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------

def list_catalog() -> list[IndicatorSpec]:
    """Template spec (default parameters) for every catalog entry."""
    return [IndicatorSpec(name, dict(entry.defaults)) for name, entry in _REGISTRY.items()]


def catalog_entry(name: str) -> CatalogEntry:
    return _lookup(name)


def primary_line(name: str) -> str:
    return _lookup(name).lines[0]


def is_causal(spec: IndicatorSpec, line: str | None = None) -> bool:
    """Whether the given output line only reads data at or before each index."""
    entry = _lookup(spec.name)
    target = line or entry.lines[0]
    if entry.name == "COUNT":
        params = _validate_params(entry, spec.params)
        return params["direction"] != "forward"
    return target not in entry.noncausal_lines


def compute_arrays(spec: IndicatorSpec, arrays: Arrays) -> dict[str, np.ndarray]:
    """Compute on raw channel arrays (all the same length, no NaNs)."""
    entry = _lookup(spec.name)
    params = _validate_params(entry, spec.params)
    lengths = {len(v) for v in arrays.values()}
    if len(lengths) != 1:
        raise ParameterError("input channels must share one length")
    out = entry.fn(arrays, params)
    return {line: out[line] for line in entry.lines}


def compute_indicator(spec: IndicatorSpec, bars: list[Bar]) -> dict[str, Series]:
    """Compute every output line of spec over one symbol's ordered bars."""
    if not bars:
        raise ParameterError("bars must be non-empty")
    dates = tuple(b.date for b in bars)
    if any(dates[i] >= dates[i + 1] for i in range(len(dates) - 1)):
        raise ParameterError("bars must be strictly increasing in date")
    arrays = {
        "open": np.array([b.open for b in bars], dtype=float),
        "high": np.array([b.high for b in bars], dtype=float),
        "low": np.array([b.low for b in bars], dtype=float),
        "close": np.array([b.close for b in bars], dtype=float),
        "volume": np.array([b.volume for b in bars], dtype=float),
    }
    out = compute_arrays(spec, arrays)
    return {line: Series(dates=dates, values=values) for line, values in out.items()}


_SPEC_RE = re.compile(r"^\s*([A-Za-z_+\-]+)\s*(?:\((.*)\))?\s*$")
_NUM_RE = re.compile(r"^-?\d+(\.\d+)?([eE][+-]?\d+)?$")


def parse_spec(text: str) -> IndicatorSpec:
    """Parse ``NAME(param=value,...)`` into a validated spec."""
    m = _SPEC_RE.match(text)
    if not m:
        raise ParameterError(f"cannot parse indicator spec {text!r}")
    name = m.group(1).upper()
    entry = _lookup(name)
    params: dict = {}
    body = m.group(2)
    if body and body.strip():
        for chunk in body.split(","):
            if "=" not in chunk:
                raise ParameterError(f"{text!r}: parameters must be key=value")
            key, raw = (s.strip() for s in chunk.split("=", 1))
            if _NUM_RE.match(raw):
                value: object = float(raw)
                if float(raw).is_integer() and "." not in raw and "e" not in raw.lower():
                    value = int(raw)
            else:
                value = raw.lower()
            params[key] = value
    _validate_params(entry, params)
    return IndicatorSpec(name=entry.name, params=params)


assert len(_REGISTRY) == 60, f"catalog must hold exactly 60 entries, found {len(_REGISTRY)}"
