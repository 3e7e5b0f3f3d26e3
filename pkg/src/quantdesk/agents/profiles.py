"""Agent profiles loaded from XML, with closed tool/action catalogs.

Profile files use the element set ``profile/name/description/basicInformation/
actionPermissions/toolPermissions/marketInformationPermissions/teamBackground``.
Profile-level action permission names are desk vocabulary ("DevelopStrategy",
"EngageInRiskManagement", ...); each maps to a set of executable ledger action
kinds via :data:`PROFILE_ACTION_TO_KINDS`, and the permission gate in
``decide_action`` checks the mapped kinds.
"""
from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass
from importlib import resources

from ..errors import ValidationError
from ..portfolio import ActionKind

# the 26-tool analytical suite referenced by profiles
TOOL_CATALOG = (
    "Technical Indicator Analysis",
    "Sentiment Analysis from Social Media",
    "Algorithmic Trading Strategies",
    "Regulatory Change Impact Analysis",
    "Economic Indicator Forecasting",
    "Corporate Earnings Analysis",
    "NASDAQ-100 Index Component Tracking",
    "Sector Performance Evaluation",
    "Risk-Adjusted Return Analysis",
    "Portfolio Diversification Tools",
    "Central Bank Policy Analysis",
    "Global Macroeconomic Trend Analysis",
    "Currency Pair Correlation Matrix",
    "Interest Rate Differential Analysis",
    "Asset Allocation Optimization",
    "Risk Management Frameworks",
    "Portfolio Stress Testing",
    "Derivatives Strategy Formulation",
    "Fund Performance Evaluation",
    "FinReport",
    "Trend Forecasting",
    "Volatility Assessment Tool",
    "Simulation Optimization Toolkit",
    "Strategy Analysis Suite",
    "RiskAnalyzer Toolkit",
    "Risk Score Assessment Tool",
)

_TOOL_BY_LOWER = {t.lower(): t for t in TOOL_CATALOG}

# the 10 executable ledger action kinds
ACTION_CATALOG = tuple(k.value for k in ActionKind)

# profile-permission vocabulary -> executable kinds
PROFILE_ACTION_TO_KINDS: dict[str, frozenset[ActionKind]] = {
    # manager
    "MakeFinalInvestmentDecisions": frozenset({ActionKind.BUY_SELL_HOLD,
                                               ActionKind.ADJUST_QUANTITY_PRICE,
                                               ActionKind.EXECUTE_ALLOCATION}),
    "AllocateInvestmentBudget": frozenset({ActionKind.EXECUTE_ALLOCATION}),
    "ApproveStrategies": frozenset(),
    "MonitorPortfolioPerformance": frozenset({ActionKind.MARKET_SCAN,
                                              ActionKind.GENERATE_REPORT}),
    "AdjustPortfolioAllocation": frozenset({ActionKind.REBALANCE,
                                            ActionKind.ADJUST_RISK_EXPOSURE}),
    "EngageInRiskManagement": frozenset({ActionKind.SET_STOPS,
                                         ActionKind.INITIATE_HEDGE,
                                         ActionKind.ENFORCE_COMPLIANCE}),
    # strategy analyst
    "DevelopStrategy": frozenset(),
    "SimulateStrategy": frozenset({ActionKind.MARKET_SCAN}),
    "AdjustStrategyParameters": frozenset(),
    "AnalyzeStrategyPerformance": frozenset({ActionKind.GENERATE_REPORT}),
    "OptimizeStrategy": frozenset(),
    "DeployStrategy": frozenset(),
    # risk analyst
    "EvaluateRiskExposure": frozenset({ActionKind.MARKET_SCAN}),
    "ImplementRiskControls": frozenset({ActionKind.SET_STOPS,
                                        ActionKind.ENFORCE_COMPLIANCE}),
    "MonitorPortfolioRisk": frozenset({ActionKind.GENERATE_REPORT}),
    "TriggerRiskAlerts": frozenset(),
    "AdjustRiskParameters": frozenset({ActionKind.ADJUST_RISK_EXPOSURE}),
    "PerformStressTesting": frozenset(),
    # market analyst
    "ConductMarketResearch": frozenset({ActionKind.MARKET_SCAN}),
    "AnalyzeIndustryTrends": frozenset(),
    "EvaluateCompanyPerformance": frozenset(),
    "GenerateInvestmentReports": frozenset({ActionKind.GENERATE_REPORT}),
    "ProvideMarketUpdates": frozenset(),
    "RecommendInvestmentActions": frozenset(),
}

SHIPPED_PROFILE_NAMES = ("otto", "bob", "dave", "emily")


@dataclass(frozen=True)
class AgentProfile:
    name: str
    agent_type: str
    role: str
    responsible_for: str
    role_assignment: str
    description: str
    action_permissions: tuple[str, ...]
    tool_permissions: tuple[str, ...]
    market_info_permissions: tuple[str, ...]
    team_background: str

    @property
    def allowed_kinds(self) -> frozenset[ActionKind]:
        kinds: set[ActionKind] = set()
        for name in self.action_permissions:
            kinds |= PROFILE_ACTION_TO_KINDS[name]
        return frozenset(kinds)

    def permits(self, kind: ActionKind) -> bool:
        return kind in self.allowed_kinds


def _text(node: ET.Element, tag: str, where: str) -> str:
    child = node.find(tag)
    if child is None or child.text is None:
        raise ValidationError(f"{where}: missing element <{tag}>")
    return child.text.strip()


def parse_profile_xml(text: str, where: str = "<profile>") -> AgentProfile:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ValidationError(f"{where}: {exc}") from None
    if root.tag != "profile":
        raise ValidationError(f"{where}: root element must be <profile>")
    basic = root.find("basicInformation")
    if basic is None:
        raise ValidationError(f"{where}: missing <basicInformation>")
    actions = tuple(a.text.strip() for a in root.findall("actionPermissions/action") if a.text)
    tools_raw = tuple(t.text.strip() for t in root.findall("toolPermissions/tool") if t.text)
    scopes = tuple(s.text.strip() for s in root.findall("marketInformationPermissions/scope") if s.text)
    team = root.find("teamBackground")
    if team is None:
        raise ValidationError(f"{where}: missing <teamBackground>")
    team_text = _text(team, "description", where)
    for action in actions:
        if action not in PROFILE_ACTION_TO_KINDS:
            raise ValidationError(f"{where}: unknown action permission {action!r}")
    tools: list[str] = []
    for tool in tools_raw:
        canonical = _TOOL_BY_LOWER.get(tool.lower())
        if canonical is None:
            raise ValidationError(f"{where}: unknown tool {tool!r}")
        tools.append(canonical)
    if not actions or not tools or not scopes:
        raise ValidationError(f"{where}: permission lists must be non-empty")
    return AgentProfile(
        name=_text(root, "name", where),
        agent_type=_text(basic, "agentType", where),
        role=_text(basic, "role", where),
        responsible_for=_text(basic, "responsibleFor", where),
        role_assignment=_text(basic, "roleAssignment", where),
        description=_text(root, "description", where),
        action_permissions=actions,
        tool_permissions=tuple(tools),
        market_info_permissions=scopes,
        team_background=team_text,
    )


def load_profile(path: str) -> AgentProfile:
    with open(path, encoding="utf-8") as handle:
        return parse_profile_xml(handle.read(), where=path)


def load_shipped_profiles() -> dict[str, AgentProfile]:
    """The four bundled desk profiles, keyed by lowercase name."""
    out: dict[str, AgentProfile] = {}
    for name in SHIPPED_PROFILE_NAMES:
        text = resources.files("quantdesk.assets.profiles").joinpath(f"{name}.xml").read_text("utf-8")
        profile = parse_profile_xml(text, where=f"{name}.xml")
        out[name] = profile
    return out
