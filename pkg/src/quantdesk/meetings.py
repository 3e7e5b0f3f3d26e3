"""The three meeting protocols and the daily walk-forward engine loop.

Market analysis (MAM) and strategy development (SDM) run on every week-final
trading day, MAM first; the risk alert meeting (RAM) fires whenever the risk
score breaches its threshold (with hysteresis). Contribution order is fixed
per protocol: MAM Emily-Bob-Dave, SDM Bob-Dave-Emily, RAM Dave-Bob-Emily,
with exactly one synthesis by Otto. Memory writes commit only after a meeting
completes, so a failed meeting leaves the stores untouched.

Orders decided after a close (Otto's weekly rebalance, RAM de-risking) fill
at the next session's close.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from datetime import date as Date
from datetime import datetime, time

import numpy as np

from .agents.backends import ChatBackend
from .agents.memory import MemoryBank
from .agents.policy import PolicyState, risk_adjusted_reward, score_policies
from .agents.profiles import AgentProfile
from .agents.workflow import decide_action, record_reflection, render_template, summarize_query
from .errors import DegenerateInputError, InsufficientDataError, SchedulingError
from .indicators import IndicatorSpec
from .marketdata import Dataset, MarketView, NewsItem
from .metrics import MetricsReport, compute_report, filter_invested
from .portfolio import (
    CASH,
    Account,
    Action,
    ActionKind,
    Fill,
    apply_action,
    mark_to_market,
    process_stops,
)
from .risk import RamHysteresis, RiskReport, RiskWeights, build_risk_report
from .strategy import (
    BacktestResult,
    SignalCache,
    StrategyPool,
    required_lookback,
    select_candidates,
    simulate,
    target_weights,
)

logger = logging.getLogger(__name__)

MEETING_ORDERS = {
    "MAM": ("Emily", "Bob", "Dave"),
    "SDM": ("Bob", "Dave", "Emily"),
    "RAM": ("Dave", "Bob", "Emily"),
}

_MEETING_TIME = time(16, 0)


@dataclass(frozen=True)
class Contribution:
    agent: str
    section: str
    text: str
    payload: dict = field(default_factory=dict)


@dataclass(frozen=True)
class MeetingRecord:
    kind: str
    date: Date
    contributions: tuple[Contribution, ...]
    synthesis_text: str
    synthesis_payload: dict
    memory_writes: tuple[str, ...]

    def __post_init__(self):
        expected = MEETING_ORDERS[self.kind]
        got = tuple(c.agent for c in self.contributions)
        if got != expected:
            raise SchedulingError(f"{self.kind} contribution order {got} != {expected}")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "date": self.date.isoformat(),
            "contributions": [
                {"agent": c.agent, "section": c.section, "text": c.text,
                 "payload": c.payload}
                for c in self.contributions
            ],
            "synthesis": {"agent": "Otto", "text": self.synthesis_text,
                          "payload": self.synthesis_payload},
            "memory_writes": list(self.memory_writes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


@dataclass
class DeskConfig:
    """Engine knobs; every default is an engine choice, configurable."""

    initial_cash: float = 1_000_000.0
    fee_rate: float = 0.001
    benchmark_symbol: str | None = None  # None = equal-weight universe
    risk_weights: RiskWeights = field(default_factory=RiskWeights)
    ram_resume_below: float = 0.6
    ram_cooldown_days: int = 5
    participation: float = 0.10
    beta_window: int = 60
    vol_window: int = 20
    stress_shocks: tuple[float, ...] = (-0.10, -0.20, -0.30)
    derisk_cash_step: float = 0.20
    max_asset_weight: float = 0.35
    max_sector_weight: float = 0.60
    gamma: float = 0.99
    lam: float = 0.5
    recent_n: int = 8
    top_m: int = 3
    sdm_window: int = 126
    retrieval_k: int = 10
    initial_strategy: str = "cash"


def _meeting_ts(day: Date) -> datetime:
    return datetime.combine(day, _MEETING_TIME)


def _synthesize(backend: ChatBackend, otto: AgentProfile, kind: str, day: Date,
                contributions: list[Contribution]) -> str:
    highlights = [c.text.splitlines()[0] for c in contributions]
    context = {"task": "report-synthesis", "kind": kind, "date": day.isoformat(),
               "highlights": highlights}
    prompt = render_template(
        "report_synthesis",
        profile_name=otto.name,
        profile_description=otto.description,
        date=day.isoformat(),
        meeting_kind=kind,
        contributions="\n\n".join(f"[{c.agent} / {c.section}]\n{c.text}" for c in contributions),
        context_json=json.dumps(context, sort_keys=True),
    )
    return backend.complete(prompt)


# ---------------------------------------------------------------------------
# analyst sections (deterministic tool stubs)
# ---------------------------------------------------------------------------

def _market_overview(view: MarketView, news: list[NewsItem]) -> Contribution:
    """Emily: breadth, movers, and headline digest from data at the cursor."""
    ups = downs = 0
    for symbol in view.universe:
        closes = view.closes(symbol)
        if len(closes) >= 2:
            if closes[-1] > closes[-2]:
                ups += 1
            elif closes[-1] < closes[-2]:
                downs += 1
    movers = []
    for symbol in view.universe:
        closes = view.closes(symbol)
        if len(closes) >= 2:
            movers.append((symbol, float(closes[-1] / closes[-2] - 1.0)))
    movers.sort(key=lambda t: (-abs(t[1]), t[0]))
    top = ", ".join(f"{s} {r * 100:+.2f}%" for s, r in movers[:3]) or "no movers"
    headlines = [n.headline for n in news][-5:]
    head_text = "; ".join(headlines) if headlines else "no significant headlines"
    text = (f"market breadth {ups} up / {downs} down; top movers: {top}; "
            f"headlines: {head_text}")
    return Contribution(agent="Emily", section="market_overview", text=text,
                        payload={"advancers": ups, "decliners": downs,
                                 "top_movers": movers[:3], "headlines": headlines})


def _quant_section(view: MarketView, cache: SignalCache) -> Contribution:
    """Bob: trend counts from the indicator toolkit."""
    above = below = 0
    rsi_values = []
    spec_sma = IndicatorSpec("SMA", {"n": 20})
    spec_rsi = IndicatorSpec("RSI", {"n": 14})
    for symbol in view.universe:
        closes = view.closes(symbol)
        if len(closes) == 0:
            continue
        sma = cache.value_at(symbol, spec_sma, "sma", view)
        if sma is not None:
            if closes[-1] > sma:
                above += 1
            else:
                below += 1
        rsi = cache.value_at(symbol, spec_rsi, "rsi", view)
        if rsi is not None:
            rsi_values.append(rsi)
    mean_rsi = float(np.mean(rsi_values)) if rsi_values else float("nan")
    text = (f"trend: {above} above / {below} below their 20-day average; "
            f"mean 14-day RSI {mean_rsi:.2f}" if rsi_values else
            f"trend: {above} above / {below} below their 20-day average; RSI warming up")
    return Contribution(agent="Bob", section="quantitative_analysis", text=text,
                        payload={"above_sma20": above, "below_sma20": below,
                                 "mean_rsi14": None if not rsi_values else mean_rsi})


def _risk_section(agent: str, report: RiskReport | None, view: MarketView) -> Contribution:
    """Dave: the portfolio risk report, or market volatility while warming up."""
    if report is not None:
        text = (f"risk score {report.r_score:.4f} (beta {report.beta_p:.3f}, "
                f"LR {report.liquidity_ratio:.3f}, max sector "
                f"{max(report.sector_exposure.values(), default=0.0):.3f}, "
                f"sigma {report.sigma_p:.5f}); eta {report.eta:.3f}, tau {report.tau:+.3f}")
        payload = json.loads(report.to_json())
    else:
        vols = []
        for symbol in view.universe:
            closes = view.closes(symbol)
            if len(closes) >= 21:
                r = closes[-20:] / closes[-21:-1] - 1.0
                vols.append((symbol, float(np.std(r, ddof=1))))
        vols.sort(key=lambda t: (-t[1], t[0]))
        top = ", ".join(f"{s} {v:.4f}" for s, v in vols[:3]) or "insufficient history"
        text = f"portfolio risk report warming up; most volatile names: {top}"
        payload = {"most_volatile": vols[:3]}
    return Contribution(agent=agent, section="risk_assessment", text=text, payload=payload)


# ---------------------------------------------------------------------------
# the three protocols
# ---------------------------------------------------------------------------

def run_market_analysis(desk: "TradingDesk", day: Date) -> MeetingRecord:
    """Weekly market report: Emily, then Bob, then Dave; Otto synthesizes."""
    if not desk.dataset.calendar.last_trading_day_of_week(day):
        raise SchedulingError(f"{day} is not the last trading day of its week")
    view = desk.dataset.view_at(day)
    news = view.news_until(limit=20)
    contributions = [
        _market_overview(view, news),
        _quant_section(view, desk.cache),
        _risk_section("Dave", desk.latest_risk_report, view),
    ]
    synthesis = _synthesize(desk.backend, desk.profiles["otto"], "MAM", day, contributions)
    record_id = desk.memory.insert(
        "M_R", _meeting_ts(day), synthesis,
        metadata={"kind": "MAM", "date": day.isoformat()}).id
    record = MeetingRecord(
        kind="MAM", date=day, contributions=tuple(contributions),
        synthesis_text=synthesis,
        synthesis_payload={"report": "market", "date": day.isoformat()},
        memory_writes=(record_id,),
    )
    desk.meetings.append(record)
    return record


def run_strategy_development(desk: "TradingDesk", day: Date,
                             mam: MeetingRecord | None) -> tuple[MeetingRecord, list[str], dict[str, BacktestResult]] | None:
    """Weekly simulated-trading review: Bob backtests the pool over the
    trailing window and shortlists candidates; Dave and Emily annotate.

    Returns None (with a logged reason) when history cannot cover the window
    and every strategy lookback.
    """
    calendar = desk.dataset.calendar
    if not calendar.last_trading_day_of_week(day):
        raise SchedulingError(f"{day} is not the last trading day of its week")
    i = calendar.index_of(day)
    window = desk.config.sdm_window
    lookback = max(required_lookback(s) for s in desk.pool.strategies)
    if i + 1 < max(window, lookback + 5):
        logger.info("SDM skipped on %s: %d days of history, need %d",
                    day, i + 1, max(window, lookback + 5))
        return None
    start = calendar.days[i - window + 1]
    results: dict[str, BacktestResult] = {}
    for strategy in sorted(desk.pool.strategies, key=lambda s: s.id):
        results[strategy.id] = simulate(
            strategy, (start, day), desk.dataset,
            fee_rate=desk.config.fee_rate, initial_cash=desk.config.initial_cash,
            cache=desk.cache)
    shortlist = select_candidates(desk.pool, results, top_m=desk.config.top_m)

    def line(sid: str) -> str:
        m = results[sid].metrics
        sr = "n/a" if m.SR is None else f"{m.SR:.3f}"
        tr = "n/a" if m.TR is None else f"{m.TR:.2f}%"
        mdd = "n/a" if m.MDD is None else f"{m.MDD:.2f}%"
        return f"{sid}: TR {tr}, SR {sr}, MDD {mdd}"

    bob_text = (f"backtested {len(results)} strategies over {window} days ending {day}; "
                f"shortlist: {', '.join(shortlist)}\n" +
                "\n".join(line(sid) for sid in sorted(results)))
    bob = Contribution(agent="Bob", section="simulated_trading", text=bob_text,
                       payload={"window": [start.isoformat(), day.isoformat()],
                                "shortlist": shortlist,
                                "results": {sid: results[sid].to_dict()["metrics"]
                                            for sid in sorted(results)}})
    dave_lines = []
    for sid in shortlist:
        m = results[sid].metrics
        mdd = "n/a" if m.MDD is None else f"{m.MDD:.2f}%"
        vol = "n/a" if m.Vol is None else f"{m.Vol:.2f}%"
        dave_lines.append(f"{sid}: drawdown {mdd}, volatility {vol}")
    dave = Contribution(agent="Dave", section="candidate_risk", text="\n".join(dave_lines) or "no candidates",
                        payload={"per_candidate": dave_lines})
    emily_base = mam.contributions[0].text if mam else "no market report this week"
    emily = Contribution(agent="Emily", section="market_commentary",
                         text=f"market context for the candidates: {emily_base}",
                         payload={"reference": "MAM" if mam else None})
    contributions = [bob, dave, emily]
    synthesis = _synthesize(desk.backend, desk.profiles["otto"], "SDM", day, contributions)
    record_id = desk.memory.insert(
        "M_S", _meeting_ts(day),
        f"{synthesis}\ncandidates: {', '.join(shortlist)}",
        metadata={"kind": "SDM", "date": day.isoformat(),
                  "candidates": ",".join(shortlist)}).id
    record = MeetingRecord(
        kind="SDM", date=day, contributions=tuple(contributions),
        synthesis_text=synthesis,
        synthesis_payload={"candidates": shortlist},
        memory_writes=(record_id,),
    )
    desk.meetings.append(record)
    return record, shortlist, results


def run_risk_alert(desk: "TradingDesk", day: Date, report: RiskReport) -> tuple[MeetingRecord, Action]:
    """Threshold-triggered de-risking: Dave, then Bob, then Emily; Otto acts.

    The decision shifts the configured step of weight into cash and clamps
    sector concentration through a compliance-capped allocation, queued to
    fill at the next session's close.
    """
    view = desk.dataset.view_at(day)
    dave = _risk_section("Dave", report, view)
    bob = Contribution(
        agent="Bob", section="stress_testing",
        text=(f"stress severity eta {report.eta:.3f} across shocks "
              f"{list(desk.config.stress_shocks)}"),
        payload={"eta": report.eta, "shocks": list(desk.config.stress_shocks)})
    emily = Contribution(
        agent="Emily", section="sentiment",
        text=f"market sentiment tau {report.tau:+.3f} for held names",
        payload={"tau": report.tau})
    contributions = [dave, bob, emily]
    synthesis = _synthesize(desk.backend, desk.profiles["otto"], "RAM", day, contributions)
    _, weights = mark_to_market(desk.account, view)
    equity = {s: w for s, w in weights.items() if s != CASH}
    equity_total = sum(equity.values())
    step = desk.config.derisk_cash_step
    target_equity_total = max(equity_total - step, 0.0)
    scale = (target_equity_total / equity_total) if equity_total > 0 else 0.0
    targets = {s: w * scale for s, w in equity.items()}
    action = Action(kind=ActionKind.ENFORCE_COMPLIANCE, payload={
        "weights": targets,
        "max_asset_weight": desk.config.max_asset_weight,
        "max_sector_weight": desk.config.max_sector_weight,
        "reason": "risk-alert",
    })
    record = MeetingRecord(
        kind="RAM", date=day, contributions=tuple(contributions),
        synthesis_text=synthesis,
        synthesis_payload={"decision": action.to_dict(), "r_score": report.r_score},
        memory_writes=(),
    )
    desk.meetings.append(record)
    desk.pending_actions.append(action)
    return record, action


# ---------------------------------------------------------------------------
# engine
# ---------------------------------------------------------------------------

@dataclass
class RunResult:
    dates: list[Date]
    net_values: list[float]
    weights: list[dict[str, float]]
    metrics: MetricsReport
    meetings: list[MeetingRecord]
    fills: list[Fill]
    audit: list[dict]
    counts: dict[str, int]
    risk_scores: list[tuple[Date, float]]


class TradingDesk:
    """One walk-forward run: a single account, memory bank, and policy state."""

    def __init__(self, dataset: Dataset, pool: StrategyPool,
                 profiles: dict[str, AgentProfile], backend: ChatBackend,
                 config: DeskConfig | None = None):
        self.dataset = dataset
        self.pool = pool
        self.profiles = profiles
        self.backend = backend
        self.config = config or DeskConfig()
        self.cache = SignalCache(dataset)
        self.account = Account(cash=self.config.initial_cash, fee_rate=self.config.fee_rate)
        self.memory = MemoryBank()
        self.policy = PolicyState(
            active_id=self.config.initial_strategy, gamma=self.config.gamma,
            lam=self.config.lam, recent_n=self.config.recent_n)
        self.hysteresis = RamHysteresis(
            resume_below=self.config.ram_resume_below,
            cooldown_days=self.config.ram_cooldown_days)
        self.meetings: list[MeetingRecord] = []
        self.audit: list[dict] = []
        self.pending_actions: list[Action] = []
        self.pending_reflection: tuple[str, Action] | None = None
        self.latest_risk_report: RiskReport | None = None
        self.ram_since_sdm: RiskReport | None = None
        self.dates: list[Date] = []
        self.net_values: list[float] = []
        self.weights_history: list[dict[str, float]] = []
        self.port_returns: list[float] = []
        self.bench_returns: list[float] = []
        self.weekly_real: list[float] = []
        self._last_week_nv: float | None = None
        self.risk_scores: list[tuple[Date, float]] = []
        self.pool.get(self.policy.active_id)  # the initial strategy must exist

    # -- benchmark ---------------------------------------------------------

    def _benchmark_return(self, day: Date) -> float:
        symbol = self.config.benchmark_symbol
        view = self.dataset.view_at(day)
        if symbol:
            closes = view.closes(symbol)
            if len(closes) >= 2:
                return float(closes[-1] / closes[-2] - 1.0)
            return 0.0
        moves = []
        for sym in self.dataset.symbols:
            closes = view.closes(sym)
            if len(closes) >= 2:
                moves.append(closes[-1] / closes[-2] - 1.0)
        return float(np.mean(moves)) if moves else 0.0

    # -- daily loop --------------------------------------------------------

    def run(self, start: Date, end: Date) -> RunResult:
        days = [d for d in self.dataset.calendar.days if start <= d <= end]
        if not days:
            raise InsufficientDataError("no trading days in the requested range")
        for day in days:
            self.run_trading_day(day)
        matrix = self._weight_matrix()
        report = compute_report(
            np.array(self.net_values),
            weights=None if matrix is None else filter_invested(matrix))
        counts = {
            "MAM": sum(1 for m in self.meetings if m.kind == "MAM"),
            "SDM": sum(1 for m in self.meetings if m.kind == "SDM"),
            "RAM": sum(1 for m in self.meetings if m.kind == "RAM"),
            "week_final_days": sum(
                1 for d in self.dates if self.dataset.calendar.last_trading_day_of_week(d)),
        }
        return RunResult(
            dates=list(self.dates), net_values=list(self.net_values),
            weights=list(self.weights_history), metrics=report,
            meetings=list(self.meetings), fills=list(self.account.ledger),
            audit=list(self.audit), counts=counts, risk_scores=list(self.risk_scores))

    def _weight_matrix(self) -> np.ndarray | None:
        if not self.weights_history:
            return None
        columns = sorted(self.dataset.symbols) + [CASH]
        return np.array([[w.get(c, 0.0) for c in columns] for w in self.weights_history])

    def run_trading_day(self, day: Date) -> None:
        view = self.dataset.view_at(day)
        day_index = self.dataset.calendar.index_of(day)
        process_stops(self.account, view)
        for action in self.pending_actions:
            apply_action(self.account, action, view, sectors=self._sectors())
        self.pending_actions = []
        nv, weights = mark_to_market(self.account, view)
        r_day = 0.0
        if self.net_values:
            r_day = nv / self.net_values[-1] - 1.0
            self.port_returns.append(r_day)
            self.bench_returns.append(self._benchmark_return(day))
        self.dates.append(day)
        self.net_values.append(nv)
        self.weights_history.append(weights)
        if self.pending_reflection is not None:
            query, action = self.pending_reflection
            record_reflection(self.memory, _meeting_ts(day), query, action, r_day)
            self.pending_reflection = None
        self._maybe_risk_alert(day, day_index, view)
        if self.dataset.calendar.last_trading_day_of_week(day):
            self._weekly_meetings(day, view)

    def _sectors(self) -> dict[str, str]:
        return {s: m.sector for s, m in self.dataset.assets.items()}

    def _maybe_risk_alert(self, day: Date, day_index: int, view: MarketView) -> None:
        try:
            report = build_risk_report(
                self.account, view, {s: view.asset_meta(s) for s in self.dataset.symbols},
                self.port_returns, self.bench_returns,
                weights=self.config.risk_weights,
                participation=self.config.participation,
                beta_window=self.config.beta_window,
                vol_window=self.config.vol_window,
                shocks=self.config.stress_shocks,
                news=view.news_on(day),
            )
        except (InsufficientDataError, DegenerateInputError):
            return  # not enough return history yet; no report today
        self.latest_risk_report = report
        self.risk_scores.append((day, report.r_score))
        if self.hysteresis.update(day_index, report.r_score):
            run_risk_alert(self, day, report)
            self.ram_since_sdm = report

    def _weekly_meetings(self, day: Date, view: MarketView) -> None:
        mam = run_market_analysis(self, day)
        sdm = run_strategy_development(self, day, mam)
        r_real_week = 0.0
        if self._last_week_nv is not None:
            r_real_week = self.net_values[-1] / self._last_week_nv - 1.0
        self._last_week_nv = self.net_values[-1]
        if sdm is None:
            return
        _, shortlist, results = sdm
        self.weekly_real.append(r_real_week)
        incumbent = self.policy.active_id
        incumbent_sim = results[incumbent].rewards
        r_sim_week = incumbent_sim[-1] if incumbent_sim else 0.0
        self.policy.record(r_sim_week, r_real_week)
        real_series = list(self.weekly_real)
        if self.ram_since_sdm is not None and real_series:
            ram = self.ram_since_sdm
            real_series[-1] = risk_adjusted_reward(
                real_series[-1], ram.r_score, ram.eta, ram.tau, self.policy.lam)
            self.ram_since_sdm = None
        candidates: dict[str, tuple[list[float], list[float] | None]] = {
            incumbent: (list(results[incumbent].rewards), real_series)}
        for sid in shortlist:
            if sid not in candidates:
                candidates[sid] = (list(results[sid].rewards), None)
        ranking, best = score_policies(
            candidates, self.policy.gamma, (self.policy.w_sim, self.policy.w_real),
            incumbent=incumbent)
        self.policy.active_id = best
        self.policy.candidate_ids = list(shortlist)
        best_strategy = self.pool.get(best)
        weights = target_weights(best_strategy, view, cache=self.cache)
        news = view.news_on(day)
        query = summarize_query(view, news)
        self.memory.insert("M_I", _meeting_ts(day), query,
                           metadata={"kind": "query", "date": day.isoformat()})
        memories = self.memory.retrieve(query, k=self.config.retrieval_k)
        digest = (f"{best_strategy.id} ({best_strategy.kind}): "
                  f"{best_strategy.description}; ranking "
                  f"{[(sid, round(score, 6)) for sid, score in ranking]}")
        action = decide_action(
            self.profiles["otto"], view, news, memories, digest, self.backend,
            target_weights=weights, audit=self.audit)
        self.pending_actions.append(action)
        self.pending_reflection = (query, action)
