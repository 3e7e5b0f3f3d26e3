"""Agent profiles, memory stores, chat backends, and policy selection."""

from .backends import ChatBackend, HttpChatBackend, HttpEmbedder, ScriptedBackend
from .memory import HashedNgramEmbedder, MemoryBank, MemoryRecord
from .policy import PolicyState, adaptive_weights, risk_adjusted_reward, score_policies
from .profiles import (
    ACTION_CATALOG,
    TOOL_CATALOG,
    AgentProfile,
    load_profile,
    load_shipped_profiles,
)
from .workflow import (
    decide_action,
    llm_sentiment_provider,
    parse_action,
    record_reflection,
    render_template,
    summarize_query,
    template_slots,
)

__all__ = [
    "ACTION_CATALOG",
    "TOOL_CATALOG",
    "AgentProfile",
    "ChatBackend",
    "HashedNgramEmbedder",
    "HttpChatBackend",
    "HttpEmbedder",
    "MemoryBank",
    "MemoryRecord",
    "PolicyState",
    "ScriptedBackend",
    "adaptive_weights",
    "decide_action",
    "llm_sentiment_provider",
    "load_profile",
    "load_shipped_profiles",
    "parse_action",
    "record_reflection",
    "render_template",
    "risk_adjusted_reward",
    "score_policies",
    "summarize_query",
    "template_slots",
]
