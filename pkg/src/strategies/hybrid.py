"""
Gradient/random hybrids: a coin picks the rule at every timestep.

Heads (a coin draw below ``coin_p``) applies the gradient strategy, tails applies
the random strategy. The coin comes from its own stream so forcing it in tests
leaves the query stream untouched.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from src.imitation.heads import LossNet, LossVariant
from src.strategies.abstract import QueryDecision, QueryStrategy, QueryStreams, StrategyKind
from src.strategies.baseline import RandomStrategy
from src.strategies.gated import GatedStrategy

FAIR_COIN = 0.5


class HybridStrategy(QueryStrategy):
    description: str = "Flip a coin each timestep between a gradient rule and a random rule."

    def __init__(
        self,
        name: StrategyKind,
        gradient: GatedStrategy,
        random: RandomStrategy,
        coin_p: float = FAIR_COIN,
    ) -> None:
        if gradient.epsilon is None:
            raise ValueError(f"{name}: the heads rule must be a gradient strategy")
        if not 0.0 <= coin_p <= 1.0:
            raise ValueError(f"coin_p must lie in [0, 1], got {coin_p}")
        self.name = name.value
        self.gradient = gradient
        self.random = random
        self.coin_p = coin_p
        self.lossnet_variant: LossVariant | None = gradient.lossnet_variant

    def decide(
        self,
        lossnet: LossNet | None,
        observation: np.ndarray,
        proposed_action: np.ndarray,
        streams: QueryStreams,
    ) -> QueryDecision:
        if streams.coin.random() < self.coin_p:
            decision = self.gradient.decide(lossnet, observation, proposed_action, streams)
            return replace(decision, coin="heads")
        decision = self.random.decide(lossnet, observation, proposed_action, streams)
        return replace(decision, coin="tails")


__all__ = ["FAIR_COIN", "HybridStrategy"]
