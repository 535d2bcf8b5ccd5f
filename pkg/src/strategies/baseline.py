"""
Strategies that never consult a loss network: Supervised, DAgger and Random.

Supervised and DAgger are the two ends of the query spectrum; Random spends a
fixed fraction of timesteps on the expert with no notion of risk and turns out
to be a strong baseline.
"""

from __future__ import annotations

import numpy as np

from src.imitation.heads import LossNet, LossVariant
from src.strategies.abstract import (
    FiredRule,
    QueryDecision,
    QueryStrategy,
    QueryStreams,
    StrategyKind,
)

_NO_QUERY = QueryDecision(query=False, fired_rule=FiredRule.NONE)


class SupervisedStrategy(QueryStrategy):
    """Behaviour cloning: trained on the bootstrap set only, never queries."""

    name: str = StrategyKind.SUPERVISED.value
    description: str = "Never query; train on expert demonstrations only."
    lossnet_variant: LossVariant | None = None

    def decide(
        self,
        lossnet: LossNet | None,
        observation: np.ndarray,
        proposed_action: np.ndarray,
        streams: QueryStreams,
    ) -> QueryDecision:
        return _NO_QUERY


class DAggerStrategy(QueryStrategy):
    """Always query; the executed action is therefore always the expert's."""

    name: str = StrategyKind.DAGGER.value
    description: str = "Query the expert at every visited state."
    lossnet_variant: LossVariant | None = None

    def decide(
        self,
        lossnet: LossNet | None,
        observation: np.ndarray,
        proposed_action: np.ndarray,
        streams: QueryStreams,
    ) -> QueryDecision:
        return QueryDecision(query=True, fired_rule=FiredRule.ALWAYS)


class RandomStrategy(QueryStrategy):
    """Query with fixed probability ``p_query``; consumes exactly one draw per call."""

    name: str = StrategyKind.RANDOM.value
    description: str = "Query with a fixed probability at each timestep."
    lossnet_variant: LossVariant | None = None

    def __init__(self, p_query: float = 0.3) -> None:
        if not 0.0 <= p_query <= 1.0:
            raise ValueError(f"p_query must lie in [0, 1], got {p_query}")
        self.p_query = p_query

    def decide(
        self,
        lossnet: LossNet | None,
        observation: np.ndarray,
        proposed_action: np.ndarray,
        streams: QueryStreams,
    ) -> QueryDecision:
        if streams.query.random() < self.p_query:
            return QueryDecision(query=True, fired_rule=FiredRule.RANDOM)
        return _NO_QUERY


__all__ = ["DAggerStrategy", "RandomStrategy", "SupervisedStrategy"]
