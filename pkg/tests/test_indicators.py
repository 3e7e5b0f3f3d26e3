from __future__ import annotations

from datetime import date as Date, timedelta

import numpy as np
import pytest

from quantdesk import indicators as I
from quantdesk.errors import ParameterError, RegistryError
from quantdesk.marketdata import Bar

from conftest import random_ohlcv
from oracles import INDICATOR_ORACLES, o_mean, o_std


def arrays_from_closes(closes):
    closes = np.asarray(closes, dtype=float)
    return {
        "open": closes.copy(), "high": closes * 1.001, "low": closes * 0.999,
        "close": closes.copy(), "volume": np.full(len(closes), 1000.0),
    }


def test_catalog_has_sixty_entries():
    assert len(I.list_catalog()) == 60


def test_every_entry_computes_on_synthetic_series(rng):
    arrays = random_ohlcv(rng, 300)
    for spec in I.list_catalog():
        out = I.compute_arrays(spec, arrays)
        entry = I.catalog_entry(spec.name)
        assert tuple(out) == entry.lines
        for values in out.values():
            assert len(values) == 300


def test_lookup_is_case_insensitive():
    assert I.catalog_entry("sma").name == "SMA"
    assert I.parse_spec("rsi(n=7)").name == "RSI"
    with pytest.raises(RegistryError):
        I.catalog_entry("NOPE")


def test_sma_mean_example():
    out = I.compute_arrays(I.parse_spec("SMA(n=5)"), arrays_from_closes([1, 2, 3, 4, 5]))
    assert out["sma"][-1] == 3.0
    assert np.isnan(out["sma"][:4]).all()


def test_ema_constant_fixed_point():
    for n in (1, 5, 20):
        out = I.compute_arrays(I.IndicatorSpec("EMA", {"n": n}),
                               arrays_from_closes([7.5] * 50))
        assert np.allclose(out["ema"], 7.5)


def test_rsi_pins_at_extremes():
    rising = arrays_from_closes(np.arange(1.0, 21.0))
    out = I.compute_arrays(I.IndicatorSpec("RSI", {"n": 14}), rising)
    defined = out["rsi"][~np.isnan(out["rsi"])]
    assert np.all(defined == 100.0)
    falling = arrays_from_closes(np.arange(30.0, 10.0, -1.0))
    out = I.compute_arrays(I.IndicatorSpec("RSI", {"n": 14}), falling)
    defined = out["rsi"][~np.isnan(out["rsi"])]
    assert np.all(defined == 0.0)


def test_true_range_enumerates_three_terms():
    arrays = {
        "open": np.array([9.0, 9.5]), "high": np.array([9.5, 10.0]),
        "low": np.array([8.5, 8.0]), "close": np.array([9.0, 9.8]),
        "volume": np.array([1.0, 1.0]),
    }
    out = I.compute_arrays(I.IndicatorSpec("TR"), arrays)
    # high=10, low=8, previous close=9 -> max(2, 1, 1)
    assert out["tr"][1] == 2.0
    assert np.isnan(out["tr"][0])


def test_bollinger_equals_sma_plus_k_mstd(rng):
    arrays = random_ohlcv(rng, 1000)
    closes = [float(x) for x in arrays["close"]]
    out = I.compute_arrays(I.IndicatorSpec("BOLL", {"n": 20, "k": 2.0}), arrays)
    for i in range(19, 1000, 97):
        window = closes[i - 19: i + 1]
        want = o_mean(window) + 2.0 * o_std(window)
        assert abs(out["upper"][i] - want) <= 1e-9 * max(1.0, abs(want))


def test_purity_bit_identical_runs(rng):
    arrays = random_ohlcv(rng, 500)
    for spec in I.list_catalog():
        first = I.compute_arrays(spec, arrays)
        second = I.compute_arrays(spec, {k: v.copy() for k, v in arrays.items()})
        for line in first:
            assert np.array_equal(first[line], second[line], equal_nan=True), spec.name


def test_shift_equivariance_for_bounded_lookback(rng):
    arrays = random_ohlcv(rng, 400)
    k = 37
    suffix = {name: values[k:] for name, values in arrays.items()}
    for spec in I.list_catalog():
        entry = I.catalog_entry(spec.name)
        if not entry.bounded_lookback:
            continue  # recursive forms are seeded at the series start
        full = I.compute_arrays(spec, arrays)
        shifted = I.compute_arrays(spec, suffix)
        for line in full:
            a = full[line][k:]
            b = shifted[line]
            both = ~np.isnan(a) & ~np.isnan(b)
            assert np.allclose(a[both], b[both], rtol=1e-9, atol=1e-9), (spec.name, line)


def test_warmup_prefix_is_undefined_not_zero(rng):
    arrays = random_ohlcv(rng, 100)
    out = I.compute_arrays(I.IndicatorSpec("SMA", {"n": 30}), arrays)
    assert np.isnan(out["sma"][:29]).all()
    assert not np.isnan(out["sma"][29:]).any()


def test_unknown_name_and_bad_params():
    with pytest.raises(RegistryError):
        I.parse_spec("XYZ(n=3)")
    with pytest.raises(ParameterError):
        I.parse_spec("SMA(n=0)")
    with pytest.raises(ParameterError):
        I.parse_spec("SMA(window=5)")
    with pytest.raises(ParameterError):
        I.parse_spec("COMPARE(op=gg)")
    with pytest.raises(ParameterError):
        I.parse_spec("MACD(fast=26,slow=12)").params and I.compute_arrays(
            I.IndicatorSpec("MACD", {"fast": 26, "slow": 12}), arrays_from_closes([1.0] * 30))


def test_spec_string_round_trip():
    spec = I.parse_spec("MACD(fast=12,slow=26,signal=9)")
    assert spec.canonical() == "MACD(fast=12,slow=26,signal=9)"
    assert I.parse_spec(spec.canonical()) == spec


def test_causality_flags():
    assert I.is_causal(I.parse_spec("SMA(n=5)"))
    assert I.is_causal(I.parse_spec("COUNT(n=5,direction=backward)"))
    assert not I.is_causal(I.parse_spec("COUNT(n=5,direction=forward)"))
    assert I.is_causal(I.parse_spec("ICHIMOKU()"), "tenkan")
    assert not I.is_causal(I.parse_spec("ICHIMOKU()"), "chikou")


def test_compute_indicator_aligns_to_bar_dates():
    start = Date(2021, 1, 4)
    bars = [Bar("A", start + timedelta(days=i), 10.0 + i, 10.6 + i, 9.4 + i, 10.0 + i, 100)
            for i in range(10)]
    out = I.compute_indicator(I.IndicatorSpec("SMA", {"n": 3}), bars)
    series = out["sma"]
    assert series.dates == tuple(b.date for b in bars)
    assert series.last_defined() == pytest.approx(18.0)  # mean of 17,18,19


def test_multi_line_indicators_return_named_lines(rng):
    arrays = random_ohlcv(rng, 200)
    for name, lines in [("KDJ", ("k", "d", "j")), ("MACD", ("macd", "signal", "hist")),
                        ("ICHIMOKU", ("tenkan", "kijun", "senkou_a", "senkou_b", "chikou")),
                        ("BOLL", ("upper", "middle", "lower")),
                        ("DMI", ("pdi", "mdi", "adx", "adxr")),
                        ("ERI", ("bull", "bear")), ("AROON", ("up", "down", "osc")),
                        ("STOCHRSI", ("k", "d")), ("SUPERTREND", ("upper", "lower", "direction")),
                        ("QQE", ("rsima", "qqe"))]:
        out = I.compute_arrays(I.IndicatorSpec(name), arrays)
        assert tuple(out) == lines, name


def test_oracle_agreement_on_short_series(rng):
    # the full 1000-point sweep lives in the acceptance suite
    arrays = random_ohlcv(rng, 250)
    lists = {k: [float(x) for x in v] for k, v in arrays.items()}
    for spec in I.list_catalog():
        shipped = I.compute_arrays(spec, arrays)
        expected = INDICATOR_ORACLES[spec.name](lists, {**I.catalog_entry(spec.name).defaults,
                                                        **spec.params})
        for line, got in shipped.items():
            want = np.array(expected[line], dtype=float)
            assert np.array_equal(np.isnan(got), np.isnan(want)), (spec.name, line)
            mask = ~np.isnan(got)
            diff = np.abs(got[mask] - want[mask])
            assert np.all(diff <= 1e-9 * np.maximum(1.0, np.abs(want[mask]))), (spec.name, line)
