"""Naive reference implementations used as independent oracles.

Everything here is deliberately plain-Python O(n*window) loop code computed
straight from the documented formulas, kept independent of the shipped
vectorized implementations. NaN marks undefined entries, mirroring the
package convention.
"""
from __future__ import annotations

import math

import numpy as np

NAN = float("nan")


def isnan(x) -> bool:
    return isinstance(x, float) and math.isnan(x)


# ---------------------------------------------------------------------------
# primitive loop helpers
# ---------------------------------------------------------------------------

def o_window(values, n, fn):
    out = [NAN] * len(values)
    for i in range(len(values)):
        if i >= n - 1:
            w = [values[j] for j in range(i - n + 1, i + 1)]
            if not any(isnan(x) for x in w):
                out[i] = fn(w)
    return out


def o_mean(w):
    return sum(w) / len(w)


def o_std(w):
    m = o_mean(w)
    return math.sqrt(sum((x - m) ** 2 for x in w) / (len(w) - 1))


def o_var(w):
    m = o_mean(w)
    return sum((x - m) ** 2 for x in w) / (len(w) - 1)


def o_sma(values, n):
    return o_window(values, n, o_mean)


def o_ema(values, n):
    out = [NAN] * len(values)
    alpha = 1.0 / (1.0 + n)
    acc = None
    for i, x in enumerate(values):
        if isnan(x):
            continue
        if acc is None:
            acc = x
        else:
            acc = acc + alpha * (x - acc)
        out[i] = acc
    return out


def o_shift(values, lag):
    out = [NAN] * len(values)
    for i in range(lag, len(values)):
        out[i] = values[i - lag]
    return out


def o_tr(a):
    high, low, close = a["high"], a["low"], a["close"]
    out = [NAN] * len(close)
    for i in range(1, len(close)):
        out[i] = max(high[i] - low[i], abs(high[i] - close[i - 1]),
                     abs(low[i] - close[i - 1]))
    return out


def o_roc(values, n):
    out = [NAN] * len(values)
    for i in range(n, len(values)):
        out[i] = (values[i] - values[i - n]) / values[i - n] * 100.0
    return out


def o_rsi(close, n):
    out = [NAN] * len(close)
    for i in range(n, len(close)):
        gains = losses = 0.0
        for j in range(i - n + 1, i + 1):
            d = close[j] - close[j - 1]
            if d > 0:
                gains += d
            elif d < 0:
                losses += -d
        avg_gain, avg_loss = gains / n, losses / n
        if avg_loss == 0.0:
            out[i] = 100.0
        elif avg_gain == 0.0:
            out[i] = 0.0
        else:
            out[i] = 100.0 - 100.0 / (1.0 + avg_gain / avg_loss)
    return out


def o_rsv(a, n):
    high, low, close = a["high"], a["low"], a["close"]
    out = [NAN] * len(close)
    for i in range(n - 1, len(close)):
        hh = max(high[j] for j in range(i - n + 1, i + 1))
        ll = min(low[j] for j in range(i - n + 1, i + 1))
        out[i] = 50.0 if hh == ll else (close[i] - ll) / (hh - ll) * 100.0
    return out


def o_updown_volume(a, n):
    close, volume = a["close"], a["volume"]
    up = [NAN] * len(close)
    down = [NAN] * len(close)
    for i in range(1, len(close)):
        d = close[i] - close[i - 1]
        up[i] = volume[i] if d > 0 else 0.0
        down[i] = volume[i] if d < 0 else 0.0
    return o_window(up, n, sum), o_window(down, n, sum)


# ---------------------------------------------------------------------------
# per-indicator oracles (name -> fn(arrays dict of lists, params) -> dict)
# ---------------------------------------------------------------------------

def ind_delta(a, p):
    c, n = a["close"], p["n"]
    out = [NAN] * len(c)
    for i in range(n, len(c)):
        out[i] = c[i] - c[i - n]
    return {"delta": out}


def ind_perm(a, p):
    c, n = a["close"], p["n"]

    def rank(w):
        return float(sum(1 for x in w if x < w[-1]))

    return {"perm": o_window(c, n, rank)}


def ind_logret(a, p):
    c, n = a["close"], p["n"]
    out = [NAN] * len(c)
    for i in range(n, len(c)):
        out[i] = math.log(c[i] / c[i - n])
    return {"logret": out}


def ind_max(a, p):
    return {"max": o_window(a[p["channel"]], p["n"], max)}


def ind_min(a, p):
    return {"min": o_window(a[p["channel"]], p["n"], min)}


def ind_middle(a, p):
    return {"middle": [(c + h + l) / 3.0
                       for c, h, l in zip(a["close"], a["high"], a["low"])]}


_OPS = {"le": lambda x, y: x <= y, "ge": lambda x, y: x >= y,
        "lt": lambda x, y: x < y, "gt": lambda x, y: x > y,
        "eq": lambda x, y: x == y, "ne": lambda x, y: x != y}


def ind_compare(a, p):
    x = a[p["channel"]]
    lag = p["lag"]
    out = [NAN] * len(x)
    for i in range(lag, len(x)):
        out[i] = 1.0 if _OPS[p["op"]](x[i], x[i - lag]) else 0.0
    return {"compare": out}


def ind_count(a, p):
    c, n = a["close"], p["n"]
    out = [NAN] * len(c)
    if p["direction"] == "backward":
        for i in range(n, len(c)):
            out[i] = float(sum(1 for j in range(i - n + 1, i + 1)
                               if c[j] > c[j - 1]))
    else:
        for i in range(0, len(c) - n):
            out[i] = float(sum(1 for j in range(i + 1, i + n + 1)
                               if c[j] > c[j - 1]))
    return {"count": out}


def ind_cross(a, p):
    c = a["close"]
    fast = o_sma(c, p["fast"])
    slow = o_sma(c, p["slow"])
    out = [NAN] * len(c)
    for i in range(1, len(c)):
        if any(isnan(v) for v in (fast[i], slow[i], fast[i - 1], slow[i - 1])):
            continue
        if p["direction"] == "up":
            out[i] = 1.0 if (fast[i - 1] <= slow[i - 1] and fast[i] > slow[i]) else 0.0
        else:
            out[i] = 1.0 if (fast[i - 1] >= slow[i - 1] and fast[i] < slow[i]) else 0.0
    return {"cross": out}


def ind_sma(a, p):
    return {"sma": o_sma(a[p["channel"]], p["n"])}


def ind_ema(a, p):
    return {"ema": o_ema(a[p["channel"]], p["n"])}


def ind_mstd(a, p):
    return {"mstd": o_window(a[p["channel"]], p["n"], o_std)}


def ind_mvar(a, p):
    return {"mvar": o_window(a[p["channel"]], p["n"], o_var)}


def ind_rsv(a, p):
    return {"rsv": o_rsv(a, p["n"])}


def ind_rsi(a, p):
    return {"rsi": o_rsi(a["close"], p["n"])}


def ind_kdj(a, p):
    rsv = o_rsv(a, p["n"])
    k = o_window(rsv, p["smooth"], o_mean)
    d = o_window(k, p["smooth"], o_mean)
    j = [NAN if (isnan(ki) or isnan(di)) else 3.0 * ki - 2.0 * di
         for ki, di in zip(k, d)]
    return {"k": k, "d": d, "j": j}


def ind_boll(a, p):
    x = a[p["channel"]]
    mid = o_sma(x, p["n"])
    band = o_window(x, p["n"], o_std)
    upper = [NAN if isnan(m) else m + p["k"] * s for m, s in zip(mid, band)]
    lower = [NAN if isnan(m) else m - p["k"] * s for m, s in zip(mid, band)]
    return {"upper": upper, "middle": mid, "lower": lower}


def ind_macd(a, p):
    c = a["close"]
    fast = o_ema(c, p["fast"])
    slow = o_ema(c, p["slow"])
    line = [f - s for f, s in zip(fast, slow)]
    signal = o_ema(line, p["signal"])
    hist = [m - s for m, s in zip(line, signal)]
    return {"macd": line, "signal": signal, "hist": hist}


def ind_cr(a, p):
    n = p["n"]
    close, high, low = a["close"], a["high"], a["low"]
    out = [NAN] * len(close)
    for i in range(n - 1, len(close)):
        mid_sum = sum((close[j] + high[j] + low[j]) / 3.0 for j in range(i - n + 1, i + 1))
        rng_sum = sum(high[j] - low[j] for j in range(i - n + 1, i + 1))
        out[i] = NAN if rng_sum == 0 else mid_sum / rng_sum
    return {"cr": out}


def ind_wr(a, p):
    n = p["n"]
    high, low, close = a["high"], a["low"], a["close"]
    out = [NAN] * len(close)
    for i in range(n - 1, len(close)):
        hh = max(high[j] for j in range(i - n + 1, i + 1))
        ll = min(low[j] for j in range(i - n + 1, i + 1))
        out[i] = -50.0 if hh == ll else (hh - close[i]) / (hh - ll) * -100.0
    return {"wr": out}


def ind_cci(a, p):
    c, n = a["close"], p["n"]
    out = [NAN] * len(c)
    for i in range(n - 1, len(c)):
        w = c[i - n + 1: i + 1]
        m = o_mean(w)
        md = o_mean([abs(x - m) for x in w])
        out[i] = NAN if md == 0 else 0.015 * (c[i] - m) / md
    return {"cci": out}


def ind_tr(a, p):
    return {"tr": o_tr(a)}


def ind_atr(a, p):
    return {"atr": o_window(o_tr(a), p["n"], o_mean)}


def ind_dma(a, p):
    c = a["close"]
    fast = o_sma(c, p["fast"])
    slow = o_sma(c, p["slow"])
    return {"dma": [NAN if (isnan(f) or isnan(s)) else f - s
                    for f, s in zip(fast, slow)]}


def _o_directional(a, n):
    tr = o_tr(a)
    high, low = a["high"], a["low"]
    ll = o_window(low, n, min)
    pdi = [NAN] * len(high)
    mdi = [NAN] * len(high)
    for i in range(len(high)):
        if isnan(tr[i]) or isnan(ll[i]):
            continue
        if tr[i] == 0:
            continue
        pdi[i] = (high[i] - ll[i]) / tr[i]
        mdi[i] = (ll[i] - low[i]) / tr[i]
    return pdi, mdi


def _o_adx(pdi, mdi, n):
    out = [NAN] * len(pdi)
    acc = None
    for i in range(len(pdi)):
        if isnan(pdi[i]) or isnan(mdi[i]):
            if acc is None:
                continue
            dx = NAN
        else:
            denom = abs(pdi[i]) + abs(mdi[i])
            dx = 0.0 if denom == 0 else 100.0 * abs(pdi[i] - mdi[i]) / denom
        if acc is None:
            acc = dx
        else:
            acc = (n * acc + dx) / (n + 1.0)
        out[i] = acc
    return out


def _o_half(x):
    out = [NAN] * len(x)
    acc = None
    for i, v in enumerate(x):
        if isnan(v) and acc is None:
            continue
        if acc is None:
            acc = v
        else:
            acc = (v + acc) / 2.0
        out[i] = acc
    return out


def ind_pdi(a, p):
    pdi, _ = _o_directional(a, p["n"])
    return {"pdi": pdi}


def ind_mdi(a, p):
    _, mdi = _o_directional(a, p["n"])
    return {"mdi": mdi}


def ind_adx(a, p):
    pdi, mdi = _o_directional(a, p["n"])
    return {"adx": _o_adx(pdi, mdi, p["n"])}


def ind_adxr(a, p):
    pdi, mdi = _o_directional(a, p["n"])
    return {"adxr": _o_half(_o_adx(pdi, mdi, p["n"]))}


def ind_dmi(a, p):
    pdi, mdi = _o_directional(a, p["n"])
    adx = _o_adx(pdi, mdi, p["n"])
    return {"pdi": pdi, "mdi": mdi, "adx": adx, "adxr": _o_half(adx)}


def ind_trix(a, p):
    t = o_ema(o_ema(o_ema(a["close"], p["n"]), p["n"]), p["n"])
    out = [NAN] * len(t)
    for i in range(1, len(t)):
        if not isnan(t[i]) and not isnan(t[i - 1]) and t[i - 1] != 0:
            out[i] = (t[i] - t[i - 1]) / t[i - 1]
    return {"trix": out}


def ind_tema(a, p):
    e1 = o_ema(a["close"], p["n"])
    e2 = o_ema(e1, p["n"])
    e3 = o_ema(e2, p["n"])
    return {"tema": [3 * x - 3 * y + z for x, y, z in zip(e1, e2, e3)]}


def ind_vr(a, p):
    up, down = o_updown_volume(a, p["n"])
    out = [NAN] * len(up)
    for i in range(len(up)):
        if isnan(up[i]):
            continue
        total = up[i] + down[i]
        out[i] = 0.0 if total == 0 else (up[i] - down[i]) / total * 100.0
    return {"vr": out}


def ind_mfi(a, p):
    n = p["n"]
    flow = [(c + h + l) / 3.0 * v for c, h, l, v in
            zip(a["close"], a["high"], a["low"], a["volume"])]
    mean_flow = o_window(flow, n, o_mean)
    out = [NAN] * len(flow)
    for i in range(len(flow)):
        if not isnan(mean_flow[i]) and mean_flow[i] != 0:
            out[i] = flow[i] / mean_flow[i] * 100.0
    return {"mfi": out}


def ind_vwma(a, p):
    n = p["n"]
    close, volume = a["close"], a["volume"]
    out = [NAN] * len(close)
    for i in range(n - 1, len(close)):
        pv = sum(close[j] * volume[j] for j in range(i - n + 1, i + 1))
        v = sum(volume[j] for j in range(i - n + 1, i + 1))
        out[i] = NAN if v == 0 else pv / v
    return {"vwma": out}


def ind_chop(a, p):
    n = p["n"]
    tr = o_tr(a)
    high, low = a["high"], a["low"]
    out = [NAN] * len(high)
    for i in range(n, len(high)):
        if any(isnan(tr[j]) for j in range(i - n + 1, i + 1)):
            continue
        tr_sum = sum(tr[j] for j in range(i - n + 1, i + 1))
        hh = max(high[j] for j in range(i - n + 1, i + 1))
        ll = min(low[j] for j in range(i - n + 1, i + 1))
        if hh == ll:
            continue
        ratio = tr_sum / (hh - ll)
        if ratio > 0:
            out[i] = 100.0 * math.log10(ratio) / math.log10(n)
    return {"chop": out}


def ind_ker(a, p):
    return {"ker": [(h - l) / h for h, l in zip(a["high"], a["low"])]}


def ind_kama(a, p):
    c, n = a["close"], p["n"]
    fastest = 2.0 / (p["fast"] + 1.0)
    slowest = 2.0 / (p["slow"] + 1.0)
    out = [NAN] * len(c)
    if len(c) <= n:
        return {"kama": out}
    acc = c[n]
    out[n] = acc
    for i in range(n + 1, len(c)):
        vol = sum(abs(c[j] - c[j - 1]) for j in range(i - n + 1, i + 1))
        er = abs(c[i] - c[i - n]) / vol if vol > 0 else 0.0
        sc = (er * (fastest - slowest) + slowest) ** 2
        acc = acc + sc * (c[i] - acc)
        out[i] = acc
    return {"kama": out}


def ind_ppo(a, p):
    fast = o_ema(a["close"], p["fast"])
    slow = o_ema(a["close"], p["slow"])
    out = [NAN if s == 0 else (f - s) / s * 100.0 for f, s in zip(fast, slow)]
    return {"ppo": out}


def ind_stochrsi(a, p):
    rsi = o_rsi(a["close"], p["n"])
    mn = o_window(rsi, p["stoch"], min)
    mx = o_window(rsi, p["stoch"], max)
    k = [NAN] * len(rsi)
    for i in range(len(rsi)):
        if isnan(mn[i]):
            continue
        k[i] = 50.0 if mx[i] == mn[i] else (rsi[i] - mn[i]) / (mx[i] - mn[i]) * 100.0
    return {"k": k, "d": o_window(k, p["smooth"], o_mean)}


def ind_wt(a, p):
    ap = [(c + h + l) / 3.0 for c, h, l in zip(a["close"], a["high"], a["low"])]
    esa = o_ema(ap, p["n1"])
    dev = o_ema([abs(x - e) for x, e in zip(ap, esa)], p["n1"])
    ci = []
    for x, e, d in zip(ap, esa, dev):
        if d == 0:
            ci.append(0.0)
        else:
            ci.append((x - e) / (0.015 * d))
    wt1 = o_ema(ci, p["n2"])
    return {"wt1": wt1, "wt2": o_window(wt1, 4, o_mean)}


def ind_supertrend(a, p):
    c = a["close"]
    atr = o_window(o_tr(a), p["n"], o_mean)
    upper = [NAN] * len(c)
    lower = [NAN] * len(c)
    direction = [NAN] * len(c)
    state = 1.0
    for i in range(1, len(c)):
        if isnan(atr[i]):
            continue
        upper[i] = c[i - 1] + p["mult"] * atr[i]
        lower[i] = c[i - 1] - p["mult"] * atr[i]
        if state > 0 and c[i] <= lower[i]:
            state = -1.0
        elif state < 0 and c[i] >= upper[i]:
            state = 1.0
        direction[i] = state
    return {"upper": upper, "lower": lower, "direction": direction}


def ind_aroon(a, p):
    n = p["n"]
    high, low = a["high"], a["low"]
    up = [NAN] * len(high)
    down = [NAN] * len(high)
    osc = [NAN] * len(high)
    for i in range(n, len(high)):
        w_high = high[i - n: i + 1]
        w_low = low[i - n: i + 1]
        argmax = w_high.index(max(w_high))  # earliest occurrence on ties
        argmin = w_low.index(min(w_low))
        since_high = n - argmax
        since_low = n - argmin
        up[i] = 100.0 * (n - since_high) / n
        down[i] = 100.0 * (n - since_low) / n
        osc[i] = up[i] - down[i]
    return {"up": up, "down": down, "osc": osc}


def ind_zscore(a, p):
    c, n = a["close"], p["n"]
    out = [NAN] * len(c)
    for i in range(n - 1, len(c)):
        w = c[i - n + 1: i + 1]
        sd = o_std(w)
        out[i] = 0.0 if sd == 0 else (c[i] - o_mean(w)) / sd
    return {"zscore": out}


def ind_ao(a, p):
    c = a["close"]
    fast = o_sma(c, p["fast"])
    slow = o_sma(c, p["slow"])
    return {"ao": [NAN if (isnan(f) or isnan(s)) else f - s
                   for f, s in zip(fast, slow)]}


def ind_bop(a, p):
    out = []
    for o, h, l, c, v in zip(a["open"], a["high"], a["low"], a["close"], a["volume"]):
        base = 0.0 if h == l else (c - o) / (h - l)
        out.append(base * v)
    return {"bop": out}


def ind_mad(a, p):
    def mad(w):
        m = o_mean(w)
        return o_mean([abs(x - m) for x in w])

    return {"mad": o_window(a["close"], p["n"], mad)}


def ind_roc(a, p):
    return {"roc": o_roc(a["close"], p["n"])}


def ind_coppock(a, p):
    r1 = o_roc(a["close"], p["r1"])
    r2 = o_roc(a["close"], p["r2"])
    out = [NAN if (isnan(x) or isnan(y)) else (x + p["weight"] * y) / (1.0 + p["weight"])
           for x, y in zip(r1, r2)]
    return {"coppock": out}


def ind_ichimoku(a, p):
    high, low, close = a["high"], a["low"], a["close"]
    n = len(close)

    def midpoint(win):
        out = [NAN] * n
        for i in range(win - 1, n):
            hh = max(high[j] for j in range(i - win + 1, i + 1))
            ll = min(low[j] for j in range(i - win + 1, i + 1))
            out[i] = (hh + ll) / 2.0
        return out

    tenkan = midpoint(p["tenkan"])
    kijun = midpoint(p["kijun"])
    span_raw = [NAN if (isnan(t) or isnan(k)) else (t + k) / 2.0
                for t, k in zip(tenkan, kijun)]
    span_b_raw = midpoint(p["span_b"])
    shift = p["kijun"]
    senkou_a = o_shift(span_raw, shift)
    senkou_b = o_shift(span_b_raw, shift)
    chikou = [NAN] * n
    for i in range(n - shift):
        chikou[i] = close[i + shift]
    return {"tenkan": tenkan, "kijun": kijun, "senkou_a": senkou_a,
            "senkou_b": senkou_b, "chikou": chikou}


def ind_cti(a, p):
    c = a["close"]
    fast = o_sma(c, p["fast"])
    slow = o_sma(c, p["slow"])
    out = [NAN] * len(c)
    for i in range(len(c)):
        if isnan(fast[i]) or isnan(slow[i]) or fast[i] + slow[i] == 0:
            continue
        out[i] = (fast[i] - slow[i]) / (fast[i] + slow[i])
    return {"cti": out}


def ind_lrma(a, p):
    c, n = a["close"], p["n"]

    def fit(w):
        t_mean = (n - 1) / 2.0
        y_mean = o_mean(w)
        num = sum((j - t_mean) * (w[j] - y_mean) for j in range(n))
        den = sum((j - t_mean) ** 2 for j in range(n))
        slope = num / den
        return y_mean + slope * (n - 1 - t_mean)

    return {"lrma": o_window(c, n, fit)}


def ind_eri(a, p):
    bull = [(h + l + c) / 3.0 for h, l, c in zip(a["high"], a["low"], a["close"])]
    bear = [(h + l - c) / 3.0 for h, l, c in zip(a["high"], a["low"], a["close"])]
    return {"bull": bull, "bear": bear}


def ind_ftr(a, p):
    return {"ftr": [math.log((h + l) / 2.0) for h, l in zip(a["high"], a["low"])]}


def ind_rvgi(a, p):
    c = a["close"]
    fast = o_sma(c, p["fast"])
    slow = o_sma(c, p["slow"])
    out = [NAN] * len(c)
    for i in range(len(c)):
        if isnan(fast[i]) or isnan(slow[i]) or slow[i] == 0:
            continue
        out[i] = (fast[i] - slow[i]) / slow[i] * 100.0
    return {"rvgi": out}


def ind_inertia(a, p):
    c = a["close"]
    out = [NAN] * len(c)
    for i in range(1, len(c)):
        out[i] = (c[i] - c[i - 1]) / c[i - 1] * 100.0
    return {"inertia": out}


def ind_kst(a, p):
    c = a["close"]
    terms = []
    for r_key, s_key in (("r1", "s1"), ("r2", "s2"), ("r3", "s3"), ("r4", "s4")):
        terms.append(o_window(o_roc(c, p[r_key]), p[s_key], o_mean))
    out = []
    for vals in zip(*terms):
        out.append(NAN if any(isnan(v) for v in vals) else sum(vals))
    return {"kst": out}


def ind_pgo(a, p):
    c = a["close"]
    sma = o_sma(c, p["n"])
    return {"pgo": [NAN if isnan(m) else x - m for x, m in zip(c, sma)]}


def ind_psl(a, p):
    c, n = a["close"], p["n"]
    out = [NAN] * len(c)
    for i in range(n, len(c)):
        ups = sum(1 for j in range(i - n + 1, i + 1) if c[j] > c[j - 1])
        out[i] = ups / n * 100.0
    return {"psl": out}


def ind_pvo(a, p):
    up, down = o_updown_volume(a, p["n"])
    out = [NAN] * len(up)
    for i in range(len(up)):
        if isnan(up[i]):
            continue
        total = up[i] + down[i]
        out[i] = 0.0 if total == 0 else (up[i] - down[i]) / total * 100.0
    return {"pvo": out}


def ind_qqe(a, p):
    rsima = o_ema(o_rsi(a["close"], p["n"]), p["smooth"])
    diff = [NAN] * len(rsima)
    for i in range(1, len(rsima)):
        if not isnan(rsima[i]) and not isnan(rsima[i - 1]):
            diff[i] = abs(rsima[i] - rsima[i - 1])
    w = 2 * p["n"] - 1
    dar = [NAN if isnan(x) else x * p["factor"] for x in o_ema(o_ema(diff, w), w)]
    qqe = [NAN] * len(rsima)
    start = next((i for i, x in enumerate(dar) if not isnan(x)), len(dar))
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


INDICATOR_ORACLES = {
    "DELTA": ind_delta, "PERM": ind_perm, "LOGRET": ind_logret, "MAX": ind_max,
    "MIN": ind_min, "MIDDLE": ind_middle, "COMPARE": ind_compare, "COUNT": ind_count,
    "CROSS": ind_cross, "SMA": ind_sma, "EMA": ind_ema, "MSTD": ind_mstd,
    "MVAR": ind_mvar, "RSV": ind_rsv, "RSI": ind_rsi, "KDJ": ind_kdj,
    "BOLL": ind_boll, "MACD": ind_macd, "CR": ind_cr, "WR": ind_wr,
    "CCI": ind_cci, "TR": ind_tr, "ATR": ind_atr, "DMA": ind_dma,
    "DMI": ind_dmi, "PDI": ind_pdi, "MDI": ind_mdi, "ADX": ind_adx,
    "ADXR": ind_adxr, "TRIX": ind_trix, "TEMA": ind_tema, "VR": ind_vr,
    "MFI": ind_mfi, "VWMA": ind_vwma, "CHOP": ind_chop, "KER": ind_ker,
    "KAMA": ind_kama, "PPO": ind_ppo, "STOCHRSI": ind_stochrsi, "WT": ind_wt,
    "SUPERTREND": ind_supertrend, "AROON": ind_aroon, "ZSCORE": ind_zscore,
    "AO": ind_ao, "BOP": ind_bop, "MAD": ind_mad, "ROC": ind_roc,
    "COPPOCK": ind_coppock, "ICHIMOKU": ind_ichimoku, "CTI": ind_cti,
    "LRMA": ind_lrma, "ERI": ind_eri, "FTR": ind_ftr, "RVGI": ind_rvgi,
    "INERTIA": ind_inertia, "KST": ind_kst, "PGO": ind_pgo, "PSL": ind_psl,
    "PVO": ind_pvo, "QQE": ind_qqe,
}


# ---------------------------------------------------------------------------
# metric oracles
# ---------------------------------------------------------------------------

def o_total_return(nv):
    return (nv[-1] - nv[0]) / nv[0] * 100.0


def o_annual_return(nv, periods_per_year=252):
    h = len(nv) - 1
    return ((nv[-1] / nv[0]) ** (periods_per_year / h) - 1.0) * 100.0


def o_returns(nv):
    return [nv[i] / nv[i - 1] - 1.0 for i in range(1, len(nv))]


def o_sharpe(returns, rf=0.0):
    return (o_mean(returns) - rf) / o_std(returns)


def o_sortino(returns, rf=0.0):
    downside = [r for r in returns if r < 0]
    return (o_mean(returns) - rf) / o_std(downside)


def o_max_drawdown(nv):
    """O(n^2) scan over every (peak, trough) pair."""
    worst = 0.0
    for tau in range(len(nv)):
        for t in range(tau + 1):
            worst = max(worst, (nv[t] - nv[tau]) / nv[t])
    return worst * 100.0


def o_volatility(returns):
    return math.sqrt(252) * o_std(returns) * 100.0


def o_calmar(nv, periods_per_year=252):
    return o_annual_return(nv, periods_per_year) / o_max_drawdown(nv)


def o_entropy(weight_rows):
    totals = []
    for row in weight_rows:
        s = 0.0
        for p in row:
            if p > 0:
                s -= p * math.log(p)
        totals.append(s)
    return o_mean(totals)


def o_enb(weight_rows):
    totals = []
    for row in weight_rows:
        s = 0.0
        for p in row:
            if p > 0:
                s += (p * math.log(p)) ** 2
        totals.append(1.0 / s)
    return o_mean(totals)


# ---------------------------------------------------------------------------
# other oracles
# ---------------------------------------------------------------------------

def o_retrieve(records, query_vec, k):
    """Exhaustive cosine scan mirroring the documented tie-break."""
    scored = []
    for idx, record in enumerate(records):
        sim = float(np.dot(query_vec, record.embedding))
        scored.append((sim, record.timestamp, idx, record))
    scored.sort(key=lambda t: t[:3], reverse=True)
    return [t[3] for t in scored[:k]]


def o_policy_score(sim, real, gamma, w_sim, w_real):
    sim = list(sim)
    real = list(real or [])
    T = len(sim)
    if len(real) < T:
        real = [0.0] * (T - len(real)) + real
    else:
        real = real[-T:]
    total = 0.0
    for t in range(T):
        total += gamma ** (T - 1 - t) * (w_sim * sim[t] + w_real * real[t])
    return total


def o_mv_grid(mu, cov, risk_aversion, steps=2000):
    """Dense grid search over the 2-asset simplex."""
    assert len(mu) == 2
    best_w, best_val = None, -math.inf
    for i in range(steps + 1):
        w0 = i / steps
        w = np.array([w0, 1.0 - w0])
        val = float(mu @ w - 0.5 * risk_aversion * w @ cov @ w)
        if val > best_val:
            best_val, best_w = val, w
    return best_w
