"""Double-entry account ledger executing the ten-kind action set.

The account is the single source of truth for net value and weights. Cash can
never go negative and positions can never go short; actions that would violate
either are rejected and recorded, never partially filled. Meeting-driven
orders fill at the close of the session they are applied on. Replaying the
ledger from the initial cash reproduces the final state bit-for-bit.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from datetime import date as Date
from enum import Enum

from .errors import MarkingError, ValidationError
from .marketdata import MarketView


class ActionKind(str, Enum):
    BUY_SELL_HOLD = "BuySellHold"
    ADJUST_QUANTITY_PRICE = "AdjustQuantityPrice"
    SET_STOPS = "SetStops"
    ADJUST_RISK_EXPOSURE = "AdjustRiskExposure"
    EXECUTE_ALLOCATION = "ExecuteAllocation"
    ENFORCE_COMPLIANCE = "EnforceCompliance"
    REBALANCE = "Rebalance"
    MARKET_SCAN = "MarketScan"
    INITIATE_HEDGE = "InitiateHedge"
    GENERATE_REPORT = "GenerateReport"


ACTION_KINDS = tuple(k.value for k in ActionKind)

CASH = "CASH"


@dataclass(frozen=True)
class Action:
    """One agent action; payload schema depends on kind (see apply_action)."""

    kind: ActionKind
    payload: dict = field(default_factory=dict)

    @classmethod
    def hold(cls) -> "Action":
        return cls(kind=ActionKind.BUY_SELL_HOLD, payload={"side": "hold"})

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "payload": self.payload}


@dataclass(frozen=True)
class Fill:
    date: Date
    symbol: str
    side: str  # "buy" | "sell"
    quantity: int
    price: float
    fee: float
    reason: str

    def to_row(self) -> list:
        return [self.date.isoformat(), self.symbol, self.side, str(self.quantity),
                repr(self.price), repr(self.fee), self.reason]


@dataclass(frozen=True)
class StopOrder:
    symbol: str
    kind: str  # "stop_loss" | "take_profit"
    price: float


@dataclass
class Position:
    quantity: int
    avg_cost: float


@dataclass
class Account:
    """Cash, positions, conditional orders, and the append-only fill ledger."""

    cash: float
    fee_rate: float = 0.001
    positions: dict[str, Position] = field(default_factory=dict)
    stop_orders: list[StopOrder] = field(default_factory=list)
    ledger: list[Fill] = field(default_factory=list)
    rejected: list[dict] = field(default_factory=list)
    initial_cash: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.initial_cash is None:
            self.initial_cash = self.cash

    def quantity(self, symbol: str) -> int:
        pos = self.positions.get(symbol)
        return pos.quantity if pos else 0

    def _fee(self, quantity: int, price: float) -> float:
        return abs(quantity * price) * self.fee_rate

    def _buy(self, date: Date, symbol: str, quantity: int, price: float, reason: str) -> Fill | None:
        if quantity <= 0:
            return None
        fee = self._fee(quantity, price)
        cost = quantity * price + fee
        if cost > self.cash + 1e-9:
            self.rejected.append({"date": date.isoformat(), "symbol": symbol,
                                  "side": "buy", "quantity": quantity,
                                  "reason": "insufficient cash"})
            return None
        self.cash -= cost
        pos = self.positions.get(symbol)
        if pos is None:
            self.positions[symbol] = Position(quantity=quantity, avg_cost=price)
        else:
            total = pos.quantity + quantity
            pos.avg_cost = (pos.avg_cost * pos.quantity + price * quantity) / total
            pos.quantity = total
        fill = Fill(date=date, symbol=symbol, side="buy", quantity=quantity,
                    price=price, fee=fee, reason=reason)
        self.ledger.append(fill)
        return fill

    def _sell(self, date: Date, symbol: str, quantity: int, price: float, reason: str) -> Fill | None:
        held = self.quantity(symbol)
        if quantity <= 0 or held == 0:
            return None
        quantity = min(quantity, held)  # never go short
        fee = self._fee(quantity, price)
        self.cash += quantity * price - fee
        pos = self.positions[symbol]
        pos.quantity -= quantity
        if pos.quantity == 0:
            del self.positions[symbol]
        fill = Fill(date=date, symbol=symbol, side="sell", quantity=quantity,
                    price=price, fee=fee, reason=reason)
        self.ledger.append(fill)
        return fill


def _close_or_fail(prices: MarketView, symbol: str, context: str) -> float:
    price = prices.last_close(symbol)
    if price is None:
        raise MarkingError(f"{context}: no price for {symbol} at {prices.cursor}")
    return price


def mark_to_market(acct: Account, prices: MarketView) -> tuple[float, dict[str, float]]:
    """Net value and value-fraction weights (cash occupies the CASH slot)."""
    net_value = acct.cash
    values: dict[str, float] = {}
    for symbol, pos in acct.positions.items():
        price = _close_or_fail(prices, symbol, "mark_to_market")
        value = pos.quantity * price
        values[symbol] = value
        net_value += value
    if net_value <= 0:
        raise MarkingError("net value is not positive")
    weights = {sym: v / net_value for sym, v in sorted(values.items())}
    weights[CASH] = acct.cash / net_value
    return net_value, weights


def _rebalance_to_weights(acct: Account, date: Date, targets: dict[str, float],
                          prices: MarketView, reason: str) -> list[Fill]:
    """Converge holdings toward target value fractions at current closes.

    Sells run first so the freed cash can fund buys. Buy quantities round
    down to whole shares after the per-side fee, so cash never goes negative.
    """
    for symbol, weight in targets.items():
        if weight < 0:
            raise ValidationError(f"negative target weight for {symbol}")
    if sum(targets.values()) > 1.0 + 1e-9:
        raise ValidationError("target weights sum above 1")
    net_value, _ = mark_to_market(acct, prices)
    fills: list[Fill] = []
    desired: dict[str, int] = {}
    for symbol, weight in targets.items():
        price = _close_or_fail(prices, symbol, "rebalance")
        desired[symbol] = int(weight * net_value / (price * (1.0 + acct.fee_rate)))
    for symbol in sorted(set(acct.positions) - set(desired)):
        price = _close_or_fail(prices, symbol, "rebalance")
        fill = acct._sell(date, symbol, acct.quantity(symbol), price, reason)
        if fill:
            fills.append(fill)
    for symbol in sorted(desired):
        delta = desired[symbol] - acct.quantity(symbol)
        if delta < 0:
            price = _close_or_fail(prices, symbol, "rebalance")
            fill = acct._sell(date, symbol, -delta, price, reason)
            if fill:
                fills.append(fill)
    for symbol in sorted(desired):
        delta = desired[symbol] - acct.quantity(symbol)
        if delta > 0:
            price = _close_or_fail(prices, symbol, "rebalance")
            fill = acct._buy(date, symbol, delta, price, reason)
            if fill:
                fills.append(fill)
    return fills


def clip_weights(targets: dict[str, float], sectors: dict[str, str],
                 max_asset: float, max_sector: float) -> dict[str, float]:
    """Compliance clip: cap single-asset and sector weights; excess goes to cash."""
    clipped = {s: min(w, max_asset) for s, w in targets.items()}
    by_sector: dict[str, float] = {}
    for symbol, weight in clipped.items():
        by_sector[sectors.get(symbol, "UNKNOWN")] = by_sector.get(sectors.get(symbol, "UNKNOWN"), 0.0) + weight
    for sector, total in by_sector.items():
        if total > max_sector and total > 0:
            scale = max_sector / total
            for symbol in clipped:
                if sectors.get(symbol, "UNKNOWN") == sector:
                    clipped[symbol] *= scale
    return clipped


def apply_action(acct: Account, action: Action, prices: MarketView,
                 sectors: dict[str, str] | None = None) -> list[Fill]:
    """Execute one action against the account at the view's closes.

    Payload schemas:

    * BuySellHold: ``{"side": "buy"|"sell"|"hold", "symbol", "quantity"}``
    * AdjustQuantityPrice: same as a buy/sell with an explicit ``"price"``
      override (bounded by the session range is the caller's concern)
    * SetStops: ``{"orders": [{"symbol", "kind", "price"}, ...]}``
    * Rebalance / ExecuteAllocation / AdjustRiskExposure:
      ``{"weights": {symbol: fraction}}`` (remainder stays in cash)
    * EnforceCompliance: ``{"weights", "max_asset_weight", "max_sector_weight"}``
    * InitiateHedge: ``{"fraction": f}`` — shift f of equity weight to cash
    * MarketScan / GenerateReport / Hold: no fills
    """
    date = prices.cursor
    kind = action.kind
    payload = action.payload
    if kind in (ActionKind.MARKET_SCAN, ActionKind.GENERATE_REPORT):
        return []

    def reject_unknown(symbols) -> bool:
        unknown = [s for s in symbols if prices.last_close(s) is None]
        if unknown:
            acct.rejected.append({"date": date.isoformat(), "symbols": unknown,
                                  "reason": "unknown symbol"})
            return True
        return False

    if kind in (ActionKind.BUY_SELL_HOLD, ActionKind.ADJUST_QUANTITY_PRICE):
        side = payload.get("side", "hold")
        if side == "hold":
            return []
        symbol = payload["symbol"]
        if reject_unknown([symbol]):
            return []
        quantity = int(payload["quantity"])
        if quantity <= 0:
            raise ValidationError("quantity must be positive")
        if side not in ("buy", "sell"):
            raise ValidationError(f"unknown side {side!r}")
        price = payload.get("price")
        if price is None:
            price = _close_or_fail(prices, symbol, kind.value)
        if price <= 0:
            raise ValidationError("price must be positive")
        reason = payload.get("reason", kind.value)
        fill = (acct._buy if side == "buy" else acct._sell)(date, symbol, quantity, float(price), reason)
        return [fill] if fill else []
    if kind == ActionKind.SET_STOPS:
        orders = payload.get("orders", [])
        for o in orders:
            if o["kind"] not in ("stop_loss", "take_profit"):
                raise ValidationError(f"unknown stop kind {o['kind']!r}")
            if o["price"] <= 0:
                raise ValidationError("stop price must be positive")
        acct.stop_orders = [StopOrder(symbol=o["symbol"], kind=o["kind"], price=float(o["price"]))
                            for o in orders]
        return []
    if kind in (ActionKind.REBALANCE, ActionKind.EXECUTE_ALLOCATION,
                ActionKind.ADJUST_RISK_EXPOSURE):
        targets = dict(payload["weights"])
        for symbol, weight in targets.items():
            if weight < 0:
                raise ValidationError(f"negative target weight for {symbol}")
        if reject_unknown(targets):
            return []
        return _rebalance_to_weights(acct, date, targets, prices, kind.value)
    if kind == ActionKind.ENFORCE_COMPLIANCE:
        targets = clip_weights(dict(payload["weights"]), sectors or {},
                               float(payload.get("max_asset_weight", 1.0)),
                               float(payload.get("max_sector_weight", 1.0)))
        if reject_unknown(targets):
            return []
        return _rebalance_to_weights(acct, date, targets, prices, kind.value)
    if kind == ActionKind.INITIATE_HEDGE:
        fraction = float(payload.get("fraction", 0.0))
        if not 0.0 <= fraction <= 1.0:
            raise ValidationError("hedge fraction must lie in [0,1]")
        net_value, weights = mark_to_market(acct, prices)
        targets = {s: w * (1.0 - fraction) for s, w in weights.items() if s != CASH}
        return _rebalance_to_weights(acct, date, targets, prices, kind.value)
    raise ValidationError(f"unknown action kind {kind!r}")


def process_stops(acct: Account, day: MarketView) -> list[Fill]:
    """Trigger conditional orders against the day's bar.

    A stop-loss fires when the day's low touches the stop (fill at
    min(open, stop)); a take-profit fires when the high reaches the limit
    (fill at max(open, limit)). Triggered and orphaned stops are removed.
    """
    fills: list[Fill] = []
    remaining: list[StopOrder] = []
    for order in acct.stop_orders:
        held = acct.quantity(order.symbol)
        if held == 0:
            continue  # orphaned stop, garbage-collect
        bar = day.bar_on(order.symbol, day.cursor)
        if bar is None:
            remaining.append(order)
            continue
        if order.kind == "stop_loss" and bar.low <= order.price:
            price = min(bar.open, order.price)
            fill = acct._sell(day.cursor, order.symbol, held, price, "stop_loss")
            if fill:
                fills.append(fill)
        elif order.kind == "take_profit" and bar.high >= order.price:
            price = max(bar.open, order.price)
            fill = acct._sell(day.cursor, order.symbol, held, price, "take_profit")
            if fill:
                fills.append(fill)
        else:
            remaining.append(order)
    acct.stop_orders = remaining
    return fills


def replay_ledger(initial_cash: float, fee_rate: float, ledger: list[Fill]) -> Account:
    """Rebuild an account from its fill history alone."""
    acct = Account(cash=initial_cash, fee_rate=fee_rate)
    for fill in ledger:
        if fill.side == "buy":
            acct.cash -= fill.quantity * fill.price + fill.fee
            pos = acct.positions.get(fill.symbol)
            if pos is None:
                acct.positions[fill.symbol] = Position(quantity=fill.quantity, avg_cost=fill.price)
            else:
                total = pos.quantity + fill.quantity
                pos.avg_cost = (pos.avg_cost * pos.quantity + fill.price * fill.quantity) / total
                pos.quantity = total
        else:
            acct.cash += fill.quantity * fill.price - fill.fee
            pos = acct.positions[fill.symbol]
            pos.quantity -= fill.quantity
            if pos.quantity == 0:
                del acct.positions[fill.symbol]
        acct.ledger.append(fill)
    return acct


LEDGER_COLUMNS = ("date", "symbol", "side", "qty", "price", "fee", "reason")


def export_ledger_csv(acct: Account, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(LEDGER_COLUMNS)
        for fill in acct.ledger:
            writer.writerow(fill.to_row())


def account_snapshot(acct: Account) -> dict:
    return {
        "cash": acct.cash,
        "fee_rate": acct.fee_rate,
        "initial_cash": acct.initial_cash,
        "positions": {s: {"quantity": p.quantity, "avg_cost": p.avg_cost}
                      for s, p in sorted(acct.positions.items())},
        "stop_orders": [{"symbol": o.symbol, "kind": o.kind, "price": o.price}
                        for o in acct.stop_orders],
        "fills": len(acct.ledger),
        "rejected": len(acct.rejected),
    }


def export_account_json(acct: Account, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(account_snapshot(acct), handle, indent=2, sort_keys=True)
        handle.write("\n")
