"""Single-agent and single-market update rules.

This module holds the per-tick mechanics for one asset market: the shared
prediction table over the m-bit movement history, square-root price impact,
impact-weighted transaction prices, round-trip settlement, confidence-weighted
strategy scores, gene mutation with reflecting boundaries, and the
attainment-triggered shift between markets.

Everything here is scalar and stateful-per-object; the simulation engine
(`emgsim.engine`) applies the same rules in vectorized form and is
cross-checked against these functions in the test suite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MARKET_A = "A"
MARKET_B = "B"


@dataclass
class AgentState:
    """One trader.

    `gene` is the probability of acting according to the market's shared
    prediction. Gains and losses since the current strategy was adopted are
    kept separately (`s_plus` >= 0, `s_minus` <= 0) so the strategy score can
    be re-weighted by any confidence value. `omega` accumulates realized
    round-trip attainment since the agent entered its current market.
    """

    gene: float
    market: str = MARKET_A
    position: str = "flat"  # "flat" | "long"
    open_price: float | None = None
    s_plus: float = 0.0
    s_minus: float = 0.0
    omega: float = 0.0
    wealth: float = 0.0
    t_in: int = 0


@dataclass
class MarketState:
    """One asset: price, packed m-bit movement history, prediction table.

    `history` packs the last `memory` movement bits into an integer
    (1 = up), newest move in bit 0. `prediction_table[h]` is the movement
    (+1/-1) the crowd expects after history pattern `h`.
    """

    memory: int
    price: float = 0.0
    history: int = 0
    prediction_table: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int8))
    last_excess: int = 0

    @classmethod
    def fresh(cls, memory: int, rng: np.random.Generator) -> "MarketState":
        """Market at price 0 with random history and random +-1 table."""
        history = int(rng.integers(0, 2**memory))
        table = (2 * rng.integers(0, 2, size=2**memory) - 1).astype(np.int8)
        return cls(memory=memory, history=history, prediction_table=table)

    def history_bits(self) -> tuple[int, ...]:
        """Unpack the history into +-1 movement signs, oldest first."""
        bits = []
        for j in range(self.memory - 1, -1, -1):
            bits.append(1 if (self.history >> j) & 1 else -1)
        return tuple(bits)


@dataclass(frozen=True)
class TradeOutcome:
    """Result of one completed buy-then-sell round trip."""

    agent_id: int
    attainment: float
    closed_at: int


def decide_action(agent: AgentState, market: MarketState, rng_draw: float) -> int:
    """Choose +1 (buy), -1 (sell) or 0 (hold) for this tick.

    The agent intends to follow the market's prediction with probability
    `gene` (rng_draw < gene) and to go against it otherwise. An intended buy
    is only possible when flat, an intended sell only when long; otherwise
    the agent holds.
    """
    prediction = int(market.prediction_table[market.history])
    intended = prediction if rng_draw < agent.gene else -prediction
    if intended == 1 and agent.position == "flat":
        return 1
    if intended == -1 and agent.position == "long":
        return -1
    return 0


def movement_bit(excess: int, tie_draw: float = 0.0) -> int:
    """Sign of the price move recorded into the history.

    Zero excess demand leaves the price unchanged but the history still
    needs a bit: +1 or -1 with probability 1/2 each via `tie_draw`.
    """
    if excess > 0:
        return 1
    if excess < 0:
        return -1
    return 1 if tie_draw < 0.5 else -1


def update_price(market: MarketState, excess: int, bit: int) -> float:
    """Apply the square-root impact move and shift the history.

    new price = price + sgn(excess) * sqrt(|excess|). `bit` must be the
    movement bit for this tick (equal to sgn(excess) when excess != 0;
    the tie-break from `movement_bit` when excess == 0).
    """
    if excess != 0 and bit != (1 if excess > 0 else -1):
        raise ValueError("movement bit inconsistent with nonzero excess demand")
    sign = (excess > 0) - (excess < 0)
    market.price = market.price + sign * math.sqrt(abs(excess))
    market.last_excess = excess
    mask = (1 << market.memory) - 1
    market.history = ((market.history << 1) | (1 if bit > 0 else 0)) & mask
    return market.price


def transaction_price(p_now: float, p_next: float, beta: float) -> float:
    """Impact-weighted trade price: (1-beta)*p_now + beta*p_next."""
    return (1.0 - beta) * p_now + beta * p_next


def settle_round_trip(agent: AgentState, sell_price: float,
                      agent_id: int = 0, tick: int = 0) -> TradeOutcome:
    """Close a long position at `sell_price` and book the attainment.

    attainment = sell price - open price; it is added to wealth and omega,
    and split into the gain/loss score components.
    """
    if agent.position != "long" or agent.open_price is None:
        raise ValueError("settle_round_trip called on a flat agent (engine sequencing bug)")
    attainment = sell_price - agent.open_price
    agent.wealth += attainment
    agent.omega += attainment
    if attainment > 0.0:
        agent.s_plus += attainment
    else:
        agent.s_minus += attainment
    agent.position = "flat"
    agent.open_price = None
    return TradeOutcome(agent_id=agent_id, attainment=attainment, closed_at=tick)


def open_position(agent: AgentState, buy_price: float) -> None:
    """Record a buy. Only the entry price is stored; scores are untouched."""
    if agent.position != "flat":
        raise ValueError("open_position called on a long agent (engine sequencing bug)")
    agent.position = "long"
    agent.open_price = buy_price


def score(agent: AgentState, gamma: float) -> float:
    """Strategy score: accumulated gains plus confidence-weighted losses."""
    return agent.s_plus + gamma * agent.s_minus


def mutate_strategy(agent: AgentState, rng_draw: float, width: float) -> float:
    """Draw a new gene uniformly from a window of `width` around the old one.

    Candidates outside [0, 1] are reflected back in. The gain/loss components
    are reset so the new strategy starts with a clean score.
    """
    candidate = agent.gene + (rng_draw - 0.5) * width
    if candidate < 0.0:
        candidate = -candidate
    elif candidate > 1.0:
        candidate = 2.0 - candidate
    agent.gene = candidate
    agent.s_plus = 0.0
    agent.s_minus = 0.0
    return candidate


def maybe_switch_market(agent: AgentState, exit_threshold: float, tick: int,
                        market_price: float | None = None) -> bool:
    """Move the agent to the other market if omega fell below the threshold.

    The check uses the current (pre-liquidation) omega. A long agent is
    liquidated administratively at `market_price` (no impact weighting);
    that attainment is booked into wealth and the score components before
    both are reset for the new market. Returns True when a switch happened.
    """
    if agent.omega >= exit_threshold:
        return False
    if agent.position == "long":
        if market_price is None:
            raise ValueError("switching a long agent requires the market price")
        attainment = market_price - agent.open_price
        agent.wealth += attainment
        if attainment > 0.0:
            agent.s_plus += attainment
        else:
            agent.s_minus += attainment
        agent.position = "flat"
        agent.open_price = None
    agent.market = MARKET_B if agent.market == MARKET_A else MARKET_A
    agent.omega = 0.0
    agent.s_plus = 0.0
    agent.s_minus = 0.0
    agent.t_in = tick
    return True


def update_prediction_table(market: MarketState, realized_bit: int,
                            mode: str = "repeat") -> None:
    """Refresh the shared prediction for the pattern that preceded this move.

    "repeat" predicts that the move which followed this history last time
    will follow it again; "oppose" predicts the opposite. Must be called
    before `update_price` shifts the history.
    """
    if realized_bit not in (1, -1):
        raise ValueError("realized_bit must be +1 or -1")
    entry = realized_bit if mode == "repeat" else -realized_bit
    market.prediction_table[market.history] = entry
