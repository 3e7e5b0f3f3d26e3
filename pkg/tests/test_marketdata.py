from __future__ import annotations

from datetime import date as Date

import numpy as np
import pytest

from quantdesk.errors import (
    DuplicateBarError,
    EmptyDatasetError,
    LookaheadError,
    ParseError,
    ValidationError,
)
from quantdesk.marketdata import (
    Bar,
    Dataset,
    load_bars,
    save_bars,
    trading_calendar,
)

HEADER = "symbol,date,open,high,low,close,volume\n"


def write_csv(tmp_path, rows, header=HEADER):
    path = tmp_path / "bars.csv"
    path.write_text(header + "".join(r + "\n" for r in rows))
    return str(path)


def test_load_single_row_maps_fields(tmp_path):
    path = write_csv(tmp_path, ["AAPL,2021-01-04,133.52,133.61,126.76,129.41,143301900"])
    bars = load_bars(path)
    assert len(bars) == 1
    bar = bars[0]
    assert bar.symbol == "AAPL"
    assert bar.date == Date(2021, 1, 4)
    assert (bar.open, bar.high, bar.low, bar.close) == (133.52, 133.61, 126.76, 129.41)
    assert bar.volume == 143301900


def test_low_above_high_rejected(tmp_path):
    path = write_csv(tmp_path, ["AAPL,2021-01-04,100,99,101,100,10"])
    with pytest.raises(ValidationError):
        load_bars(path)


def test_duplicate_symbol_date_rejected(tmp_path):
    row = "AAPL,2021-01-04,100,101,99,100,10"
    path = write_csv(tmp_path, [row, row])
    with pytest.raises(DuplicateBarError):
        load_bars(path)


def test_malformed_row_names_line(tmp_path):
    path = write_csv(tmp_path, ["AAPL,2021-01-04,100,101,99,100,10",
                                "AAPL,2021-01-05,oops,101,99,100,10"])
    with pytest.raises(ParseError, match=":3"):
        load_bars(path)


def test_bad_header_rejected(tmp_path):
    path = write_csv(tmp_path, ["AAPL,2021-01-04,100,101,99,100,10"],
                     header="sym,when,o,h,l,c,v\n")
    with pytest.raises(ParseError):
        load_bars(path)


def test_save_load_round_trip(tmp_path):
    bars = [
        Bar("AAPL", Date(2021, 1, 4), 100.0, 101.5, 99.25, 100.75, 1000),
        Bar("AAPL", Date(2021, 1, 5), 100.75, 102.0, 100.1, 101.9, 1500),
        Bar("MSFT", Date(2021, 1, 4), 50.0, 50.5, 49.0, 50.25, 2000, adjusted_close=50.2),
    ]
    path = str(tmp_path / "out.csv")
    save_bars(bars, path)
    loaded = load_bars(path)
    assert loaded == sorted(bars, key=lambda b: (b.symbol, b.date))
    # byte-stable after one canonical pass
    save_bars(loaded, str(tmp_path / "again.csv"))
    assert (tmp_path / "out.csv").read_bytes() == (tmp_path / "again.csv").read_bytes()


def _bar(symbol, day, price=100.0):
    return Bar(symbol, day, price, price * 1.01, price * 0.99, price, 1000)


def test_calendar_week_final_days():
    days = [Date(2021, 1, d) for d in (4, 5, 6, 7, 8)]  # Mon-Fri
    cal = trading_calendar([_bar("A", d) for d in days])
    assert len(cal) == 5
    assert cal.last_trading_day_of_week(Date(2021, 1, 8))
    assert not cal.last_trading_day_of_week(Date(2021, 1, 6))


def test_calendar_holiday_week_ends_thursday():
    days = [Date(2021, 1, d) for d in (4, 5, 6, 7)] + [Date(2021, 1, 11)]
    cal = trading_calendar([_bar("A", d) for d in days])
    assert cal.last_trading_day_of_week(Date(2021, 1, 7))


def test_calendar_single_bar():
    cal = trading_calendar([_bar("A", Date(2021, 1, 4))])
    assert len(cal) == 1
    assert cal.last_trading_day_of_week(Date(2021, 1, 4))


def test_calendar_empty_is_error():
    with pytest.raises(EmptyDatasetError):
        trading_calendar([])


def test_calendar_strictly_increasing(synth_dataset):
    days = synth_dataset.calendar.days
    assert all(a < b for a, b in zip(days, days[1:]))


def test_view_in_range_and_lookahead():
    days = [Date(2021, 1, d) for d in (4, 5, 6, 7, 8, 11, 12, 13, 14, 15)]
    ds = Dataset([_bar("A", d, 100 + i) for i, d in enumerate(days)])
    view = ds.view_at(days[5])
    closes = view.closes("A")
    assert len(closes) == 6
    assert view.close_on("A", days[0]) == 100.0
    with pytest.raises(LookaheadError):
        view.close_on("A", days[6])
    with pytest.raises(LookaheadError):
        view.bar_on("A", days[9])


def test_view_unaffected_by_future_mutation():
    days = [Date(2021, 1, d) for d in (4, 5, 6, 7, 8)]
    ds = Dataset([_bar("A", d, 100 + i) for i, d in enumerate(days)])
    view = ds.view_at(days[2])
    before = view.closes("A").copy()
    # perturb the backing store strictly after the cursor
    ds.series("A").close[3:] = 999.0
    after = view.closes("A")
    assert np.array_equal(before, after)


def test_view_channels_are_copies():
    days = [Date(2021, 1, d) for d in (4, 5, 6)]
    ds = Dataset([_bar("A", d) for d in days])
    view = ds.view_at(days[-1])
    arr = view.closes("A")
    arr[:] = -1
    assert view.closes("A")[0] > 0


def test_asset_meta_average_daily_volume(synth_dataset):
    view = synth_dataset.view_at(synth_dataset.calendar.days[30])
    meta = view.asset_meta("SYM00")
    assert meta.sector != "UNKNOWN"
    assert meta.average_daily_volume > 0
