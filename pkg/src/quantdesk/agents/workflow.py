"""Single-agent workflow: query summarization, decisions, and reflections.

Prompts render from shipped templates with named ``$slot`` placeholders; the
slot set of each template is part of the public contract. The backend's reply
is parsed into an executable action; a reply proposing a kind outside the
agent's permissions is replaced by Hold with an audit entry, and unparseable
replies retry a bounded number of times before falling back to Hold.
"""
from __future__ import annotations

import json
import re
from datetime import datetime
from importlib import resources
from string import Template

from ..errors import ParseError, TransportError
from ..marketdata import MarketView, NewsItem
from ..portfolio import Action, ActionKind
from .backends import ChatBackend
from .memory import MemoryBank, MemoryRecord
from .profiles import AgentProfile

TEMPLATE_NAMES = (
    "investment_decision",
    "market_analysis",
    "strategy_development",
    "risk_management",
    "report_synthesis",
)

DEFAULT_QUERY_BUDGET = 800
DEFAULT_DECISION_RETRIES = 2

_SLOT_RE = re.compile(r"\$\{?(\w+)\}?")


def _template_text(name: str) -> str:
    if name not in TEMPLATE_NAMES:
        raise ParseError(f"unknown prompt template {name!r}")
    return resources.files("quantdesk.assets.prompts").joinpath(f"{name}.txt").read_text("utf-8")


def template_slots(name: str) -> tuple[str, ...]:
    """The named slots a template requires, in order of first appearance."""
    seen: list[str] = []
    for slot in _SLOT_RE.findall(_template_text(name)):
        if slot not in seen:
            seen.append(slot)
    return tuple(seen)


def render_template(name: str, **slots: str) -> str:
    text = _template_text(name)
    required = set(template_slots(name))
    missing = required - set(slots)
    if missing:
        raise ParseError(f"template {name!r} missing slots {sorted(missing)}")
    return Template(text).substitute(**slots)


def _top_movers(view: MarketView, count: int = 3) -> list[tuple[str, float]]:
    moves: list[tuple[str, float]] = []
    for symbol in view.universe:
        closes = view.closes(symbol)
        if len(closes) >= 2 and closes[-2] != 0:
            moves.append((symbol, float(closes[-1] / closes[-2] - 1.0)))
    moves.sort(key=lambda t: (-abs(t[1]), t[0]))
    return moves[:count]


def summarize_query(view: MarketView, news: list[NewsItem],
                    budget: int = DEFAULT_QUERY_BUDGET) -> str:
    """Deterministic one-paragraph digest of the day: date, movers, headlines."""
    parts = [f"date {view.cursor.isoformat()}"]
    movers = _top_movers(view)
    if movers:
        moved = ", ".join(f"{s} {r * +100:+.2f}%" for s, r in movers)
        parts.append(f"top movers: {moved}")
    else:
        parts.append("no price history yet")
    if news:
        headlines = [n.headline for n in news]
        digest = "; ".join(headlines)
        text = f"headlines ({len(headlines)}): {digest}"
        parts.append(text)
    else:
        parts.append("no significant headlines")
    query = " | ".join(parts)
    if len(query) > budget:
        query = query[: budget - 15].rstrip() + f"... [+{len(query) - budget + 15} chars]"
    return query


def parse_action(reply: str) -> Action:
    """The reply parser: extract the first JSON object and build an Action."""
    start = reply.find("{")
    if start < 0:
        raise ParseError("reply contains no JSON object")
    depth = 0
    end = None
    for i in range(start, len(reply)):
        if reply[i] == "{":
            depth += 1
        elif reply[i] == "}":
            depth -= 1
            if depth == 0:
                end = i + 1
                break
    if end is None:
        raise ParseError("unbalanced JSON object in reply")
    try:
        obj = json.loads(reply[start:end])
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad JSON in reply: {exc}") from None
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ParseError("reply JSON must carry a 'kind'")
    kind_text = str(obj["kind"])
    if kind_text.lower() == "hold":
        return Action.hold()
    for kind in ActionKind:
        if kind.value.lower() == kind_text.lower():
            payload = obj.get("payload", {})
            if not isinstance(payload, dict):
                raise ParseError("payload must be an object")
            return Action(kind=kind, payload=payload)
    raise ParseError(f"unknown action kind {kind_text!r}")


def decide_action(agent: AgentProfile, view: MarketView, news: list[NewsItem],
                  memories: list[MemoryRecord], strategy_digest: str,
                  backend: ChatBackend, *, target_weights: dict[str, float] | None = None,
                  audit: list[dict] | None = None,
                  max_retries: int = DEFAULT_DECISION_RETRIES) -> Action:
    """Render the decision prompt, call the backend, and parse the reply.

    Falls back to Hold (with an audit entry) on repeated parse failures,
    transport failure, or an unpermitted proposed kind.
    """
    audit_log = audit if audit is not None else []
    context = {
        "task": "investment-decision",
        "date": view.cursor.isoformat(),
        "target_weights": target_weights or {},
    }
    prompt = render_template(
        "investment_decision",
        profile_name=agent.name,
        profile_description=agent.description,
        date=view.cursor.isoformat(),
        prices_digest=summarize_query(view, []),
        news_digest="; ".join(n.headline for n in news) or "none",
        memories_digest="\n".join(f"- {m.text}" for m in memories) or "none",
        strategy_digest=strategy_digest,
        actions=", ".join(sorted(k.value for k in agent.allowed_kinds)),
        context_json=json.dumps(context, sort_keys=True),
    )
    last_error = ""
    for attempt in range(max_retries + 1):
        try:
            reply = backend.complete(prompt)
        except TransportError as exc:
            audit_log.append({"event": "transport-failure", "agent": agent.name,
                              "date": view.cursor.isoformat(), "error": str(exc)})
            return Action.hold()
        try:
            action = parse_action(reply)
        except ParseError as exc:
            last_error = str(exc)
            audit_log.append({"event": "parse-retry", "agent": agent.name,
                              "date": view.cursor.isoformat(), "attempt": attempt + 1,
                              "error": last_error})
            continue
        if not agent.permits(action.kind):
            audit_log.append({"event": "unpermitted-action", "agent": agent.name,
                              "date": view.cursor.isoformat(), "kind": action.kind.value})
            return Action.hold()
        return action
    audit_log.append({"event": "parse-fallback", "agent": agent.name,
                      "date": view.cursor.isoformat(), "error": last_error})
    return Action.hold()


def record_reflection(bank: MemoryBank, timestamp: datetime, query: str,
                      action: Action, outcome: float,
                      metadata: dict[str, str] | None = None) -> MemoryRecord:
    """Write the post-hoc reflection on an action into market memory (M_I)."""
    direction = "gain" if outcome > 0 else "loss" if outcome < 0 else "flat result"
    text = (f"reflection: state [{query}] -> action {action.kind.value} "
            f"{json.dumps(action.payload, sort_keys=True)} -> {direction} of "
            f"{outcome * 100:+.4f}%")
    meta = {"kind": "reflection", "action": action.kind.value,
            "outcome": f"{outcome:.8f}"}
    meta.update(metadata or {})
    return bank.insert("M_I", timestamp, text, metadata=meta)


def llm_sentiment_provider(backend: ChatBackend):
    """Sentiment provider that delegates to a chat backend.

    Returns a callable (news, symbols) -> tau in [-1, 1]; unparseable replies
    count as neutral.
    """
    def provider(news: list[NewsItem], symbols: list[str]) -> float:
        headlines = "; ".join(n.headline for n in news) or "none"
        context = json.dumps({"task": "sentiment", "symbols": list(symbols)}, sort_keys=True)
        prompt = (
            f"Rate overall market sentiment for {', '.join(symbols) or 'the market'} "
            f"from these headlines as one number in [-1, 1].\nHeadlines: {headlines}\n"
            f"<<<CONTEXT\n{context}\n>>>"
        )
        try:
            reply = backend.complete(prompt)
            match = re.search(r"-?\d+(\.\d+)?", reply)
            value = float(match.group()) if match else 0.0
        except (TransportError, ValueError):
            value = 0.0
        return min(max(value, -1.0), 1.0)

    return provider
