from __future__ import annotations

import math

import numpy as np
import pytest

from quantdesk import metrics as M
from quantdesk.errors import DegenerateInputError, InsufficientDataError, ValidationError

from oracles import (
    o_annual_return,
    o_calmar,
    o_enb,
    o_entropy,
    o_max_drawdown,
    o_returns,
    o_sharpe,
    o_sortino,
    o_total_return,
    o_volatility,
)


def random_nv(rng, n=500):
    return 100.0 * np.exp(np.cumsum(rng.normal(0.0005, 0.01, n)))


def test_total_return_examples():
    assert M.total_return([100, 110]) == pytest.approx(10.0)
    assert M.total_return([100, 100]) == 0.0
    assert M.total_return([100, 95, 120]) == pytest.approx(20.0)
    with pytest.raises(InsufficientDataError):
        M.total_return([100])


def test_annual_return_examples():
    doubling = np.linspace(100, 200, 253)  # 252 periods = one year
    doubling = 100.0 * (2.0 ** (np.arange(253) / 252.0))
    assert M.annual_return_rate(doubling) == pytest.approx(100.0)
    assert M.annual_return_rate([100.0] * 300) == 0.0
    # 10% total over exactly two years
    two_years = 100.0 * (1.1 ** (np.arange(505) / 504.0))
    assert M.annual_return_rate(two_years) == pytest.approx((1.1 ** 0.5 - 1) * 100.0, abs=1e-9)


def test_sharpe_examples(rng):
    with pytest.raises(DegenerateInputError):
        M.sharpe([0.01, 0.01, 0.01])
    alternating = [0.01, -0.01] * 50
    assert M.sharpe(alternating) == pytest.approx(0.0)
    r = rng.normal(0.0, 0.01, 1000)
    want = o_sharpe([float(x) for x in r])
    assert M.sharpe(r) == pytest.approx(want, rel=1e-9)


def test_sortino_examples(rng):
    with pytest.raises(DegenerateInputError):
        M.sortino([0.01, 0.02, 0.03])
    # identical negatives with zero mean excess: documented 0/0 -> 0 limit
    assert M.sortino([0.01, -0.01] * 20) == 0.0
    with pytest.raises(DegenerateInputError):
        M.sortino([0.02, -0.01, 0.02, -0.01])  # zero downside std, nonzero mean
    r = rng.normal(0.0, 0.01, 1000)
    want = o_sortino([float(x) for x in r])
    assert M.sortino(r) == pytest.approx(want, rel=1e-9)


def test_max_drawdown_examples():
    assert M.max_drawdown(np.linspace(100, 200, 50)) == 0.0
    assert M.max_drawdown([100, 120, 90, 130]) == pytest.approx(25.0)
    assert M.max_drawdown([100.0]) == 0.0


def test_max_drawdown_matches_bruteforce(rng):
    for _ in range(20):
        nv = random_nv(rng, 200)
        want = o_max_drawdown([float(x) for x in nv])
        assert M.max_drawdown(nv) == pytest.approx(want, rel=1e-9, abs=1e-12)


def test_volatility_examples(rng):
    assert M.volatility([0.01] * 10) == 0.0
    # a two-point +/- pattern has sample std exactly 0.01 when centered
    r = np.array([0.01, -0.01] * 500)
    want = o_volatility([float(x) for x in r])
    assert M.volatility(r) == pytest.approx(want, rel=1e-12)
    r = rng.normal(0, 0.01, 1000)
    assert M.volatility(r) == pytest.approx(o_volatility([float(x) for x in r]), rel=1e-9)


def test_volatility_scale_constant():
    # std 0.01 exactly -> sqrt(252) percent
    r = [0.01, -0.01] * 50
    sd = float(np.std(r, ddof=1))
    assert M.volatility(r) == pytest.approx(math.sqrt(252) * sd * 100.0, rel=1e-12)


def test_calmar_examples(rng):
    with pytest.raises(DegenerateInputError):
        M.calmar(np.linspace(100, 150, 50))
    nv = random_nv(rng, 300)
    want = o_calmar([float(x) for x in nv])
    assert M.calmar(nv) == pytest.approx(want, rel=1e-9)


def test_entropy_examples(rng):
    assert M.entropy([[0.25, 0.25, 0.25, 0.25]]) == pytest.approx(math.log(4), abs=1e-12)
    assert M.entropy([[1.0, 0.0, 0.0]]) == 0.0
    w = rng.dirichlet(np.ones(6), size=40)
    want = o_entropy([[float(x) for x in row] for row in w])
    assert M.entropy(w) == pytest.approx(want, abs=1e-12)


def test_enb_examples(rng):
    uniform = [[0.25, 0.25, 0.25, 0.25]]
    want = 1.0 / (4.0 * (0.25 * math.log(0.25)) ** 2)
    assert M.enb(uniform) == pytest.approx(want, rel=1e-12)
    with pytest.raises(DegenerateInputError):
        M.enb([[1.0, 0.0]])
    w = rng.dirichlet(np.ones(5), size=30)
    assert M.enb(w) == pytest.approx(o_enb([[float(x) for x in row] for row in w]), rel=1e-9)


def test_weight_validation():
    with pytest.raises(ValidationError):
        M.entropy([[0.5, 0.6]])
    with pytest.raises(ValidationError):
        M.entropy([[0.7, -0.1, 0.4]])


def test_scale_invariance(rng):
    nv = random_nv(rng, 400)
    r = M.returns_from_net_value(nv)
    scaled = nv * 37.5
    r2 = M.returns_from_net_value(scaled)
    assert M.total_return(scaled) == pytest.approx(M.total_return(nv), abs=1e-12)
    assert M.max_drawdown(scaled) == pytest.approx(M.max_drawdown(nv), abs=1e-12)
    assert M.annual_return_rate(scaled) == pytest.approx(M.annual_return_rate(nv), abs=1e-12)
    assert M.sharpe(r2) == pytest.approx(M.sharpe(r), abs=1e-12)
    assert M.volatility(r2) == pytest.approx(M.volatility(r), abs=1e-12)


def test_entropy_maximized_by_uniform(rng):
    base = np.full(5, 0.2)
    top = M.entropy([base])
    for _ in range(200):
        noise = rng.normal(0, 0.05, 5)
        w = np.abs(base + noise)
        w = w / w.sum()
        assert M.entropy([w]) <= top + 1e-12


def test_report_handles_degenerate_inputs():
    report = M.compute_report([100.0, 100.0, 100.0], weights=[[1.0, 0.0]])
    assert report.TR == 0.0
    assert report.MDD == 0.0
    assert report.SR is None
    assert report.CR is None
    assert report.ENB is None
    round_trip = M.MetricsReport.from_json(report.to_json())
    assert round_trip == report


def test_filter_invested():
    rows = [[1.0, 0.0], [0.6, 0.4], [0.0, 1.0]]
    kept = M.filter_invested(rows)
    assert kept.shape == (1, 2)
    assert M.filter_invested([[1.0, 0.0]]) is None
