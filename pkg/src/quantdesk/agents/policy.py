"""Dual-reward policy selection: adaptive weights and discounted scoring.

The desk earns two reward channels per period: the realized portfolio return
(r_real) and the active strategy's simulated-backtest return (r_sim). The
channel weights adapt through a sigmoid of the simulated channel's share of
recent total reward; candidate strategies are then ranked by a discounted sum
of the weighted channels and the best one becomes the active policy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..errors import ConfigError

RATIO_CLIP = 3.0  # with losses the raw share can blow up; bound it before the sigmoid


def logistic(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-x))


def adaptive_weights(history: list[tuple[float, float]], n: int = 8) -> tuple[float, float]:
    """Sigmoid-adaptive (w_sim, w_real) from the last n (r_sim, r_real) pairs.

    ratio = sum(r_sim) / sum(r_sim + r_real), clipped to [-3, 3] before the
    sigmoid so the weights stay inside (logistic(-3), logistic(3)). A zero
    denominator is defined as the neutral ratio 0.5. w_real is the exact
    complement of w_sim.
    """
    if n < 1:
        raise ConfigError("n must be at least 1")
    if not history:
        raise ConfigError("need at least one recorded period")
    recent = history[-n:]
    sim_sum = sum(pair[0] for pair in recent)
    total = sum(pair[0] + pair[1] for pair in recent)
    if total == 0.0:
        ratio = 0.5
    else:
        ratio = sim_sum / total
    ratio = max(-RATIO_CLIP, min(RATIO_CLIP, ratio))
    w_sim = logistic(ratio)
    return w_sim, 1.0 - w_sim


def discounted_score(sim_rewards, real_rewards, gamma: float,
                     w_sim: float, w_real: float) -> float:
    """sum over t of gamma^(T-1-t) * (w_sim*r_sim[t] + w_real*r_real[t]).

    The real series aligns to the tail of the sim series: shorter real
    histories left-pad with zeros (candidate was not deployed then), longer
    ones keep their most recent T periods.
    """
    sim = list(sim_rewards)
    real = list(real_rewards or [])
    T = len(sim)
    if T == 0:
        return 0.0
    if len(real) < T:
        real = [0.0] * (T - len(real)) + real
    else:
        real = real[-T:]
    score = 0.0
    for t in range(T):
        score += (gamma ** (T - 1 - t)) * (w_sim * sim[t] + w_real * real[t])
    return score


def score_policies(candidates: dict[str, tuple[list[float], list[float] | None]],
                   gamma: float, weights: tuple[float, float],
                   incumbent: str | None = None) -> tuple[list[tuple[str, float]], str]:
    """Rank candidates by discounted dual-reward score and pick the best.

    ``candidates`` maps strategy id to (sim reward series, real reward series
    or None for never-deployed). Ties retain the incumbent, then fall back to
    id order. Returns (ranking best-first, best id).
    """
    if not candidates:
        raise ConfigError("empty candidate set")
    if not 0.0 < gamma <= 1.0:
        raise ConfigError("gamma must lie in (0, 1]")
    w_sim, w_real = weights
    scores: dict[str, float] = {}
    for sid, (sim, real) in candidates.items():
        scores[sid] = discounted_score(sim, real, gamma, w_sim, w_real)

    def rank_key(sid: str):
        # higher score first; incumbent wins ties; then lexicographic id
        return (-scores[sid], 0 if sid == incumbent else 1, sid)

    ranking = sorted(scores, key=rank_key)
    return [(sid, scores[sid]) for sid in ranking], ranking[0]


def risk_adjusted_reward(r_t: float, r_score: float, eta: float, tau: float,
                         lam: float, coefficients: tuple[float, float, float] = (0.5, 0.4, 0.1)) -> float:
    """(1-lam)*r_t + lam*r_risk with r_risk = -(c0*score + c1*eta - c2*tau).

    The risk reward penalizes a high risk score and stress severity and
    credits positive sentiment; with the default coefficients it spans
    [-1.0, 0.1], commensurate with period returns.
    """
    if not 0.0 <= lam <= 1.0:
        raise ConfigError("lambda must lie in [0, 1]")
    c0, c1, c2 = coefficients
    r_risk = -(c0 * r_score + c1 * eta - c2 * tau)
    return (1.0 - lam) * r_t + lam * r_risk


@dataclass
class PolicyState:
    """The active strategy, its challengers, and the reward bookkeeping."""

    active_id: str
    gamma: float = 0.99
    lam: float = 0.5
    recent_n: int = 8
    candidate_ids: list[str] = field(default_factory=list)
    reward_history: list[tuple[float, float]] = field(default_factory=list)
    w_sim: float = logistic(0.5)
    w_real: float = 1.0 - logistic(0.5)

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigError("gamma must lie in (0, 1]")
        if not 0.0 <= self.lam <= 1.0:
            raise ConfigError("lambda must lie in [0, 1]")
        if self.recent_n < 1:
            raise ConfigError("recent_n must be at least 1")

    def record(self, r_sim: float, r_real: float) -> None:
        self.reward_history.append((r_sim, r_real))
        self.w_sim, self.w_real = adaptive_weights(self.reward_history, self.recent_n)
