"""
Loss-network gated strategies and their gradient variants.

The non-gradient rule compares the scalar ``l_hat`` against a threshold: the
user's tau for the regression loss network, one half for the SafeDAgger
classifier. Gradient variants additionally query when the norm of
``d l_hat / d[s; a_hat]`` exceeds epsilon. The threshold rule is checked first,
so a step that both rules would fire is reported as ``threshold``.
"""

from __future__ import annotations

import numpy as np

from src.imitation.heads import (
    CLASSIFIER_QUERY_PROBABILITY,
    LossNet,
    LossVariant,
    loss_estimate,
    risk_gradient_norm,
)
from src.strategies.abstract import (
    FiredRule,
    QueryDecision,
    QueryStrategy,
    QueryStreams,
    StrategyKind,
    require_lossnet,
)


class GatedStrategy(QueryStrategy):
    """Threshold gating on ``l_hat`` plus the optional gradient rule."""

    name: str = "gated"
    description: str = "Query when the loss network flags the proposed action."
    lossnet_variant: LossVariant | None = LossVariant.REGRESSION

    def __init__(self, threshold: float, epsilon: float | None = None) -> None:
        if threshold <= 0:
            raise ValueError(f"threshold must be positive, got {threshold}")
        if epsilon is not None and epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {epsilon}")
        self.threshold = threshold
        self.epsilon = epsilon

    def decide(
        self,
        lossnet: LossNet | None,
        observation: np.ndarray,
        proposed_action: np.ndarray,
        streams: QueryStreams,
    ) -> QueryDecision:
        net = require_lossnet(self, lossnet)
        l_hat = loss_estimate(net, observation, proposed_action)
        grad_norm = None
        if self.epsilon is not None:
            grad_norm = risk_gradient_norm(net, observation, proposed_action)
        if l_hat > self.threshold:
            return QueryDecision(True, FiredRule.THRESHOLD, l_hat, grad_norm)
        if grad_norm is not None and self.epsilon is not None and grad_norm > self.epsilon:
            return QueryDecision(True, FiredRule.GRADIENT, l_hat, grad_norm)
        return QueryDecision(False, FiredRule.NONE, l_hat, grad_norm)


class LossStrategy(GatedStrategy):
    name: str = StrategyKind.LOSS.value
    description: str = "Query when the regression loss estimate exceeds tau."
    lossnet_variant: LossVariant | None = LossVariant.REGRESSION

    def __init__(self, tau: float) -> None:
        super().__init__(threshold=tau)
        self.tau = tau


class SafeDAggerStrategy(GatedStrategy):
    """The classifier's tau only shapes its training labels; the query cut is one half."""

    name: str = StrategyKind.SAFEDAGGER.value
    description: str = "Query when the safety classifier predicts an unsafe action."
    lossnet_variant: LossVariant | None = LossVariant.CLASSIFIER

    def __init__(self) -> None:
        super().__init__(threshold=CLASSIFIER_QUERY_PROBABILITY)


class LossGradientStrategy(GatedStrategy):
    name: str = StrategyKind.LOSS_GRADIENT.value
    description: str = "Loss rule, or query when the loss gradient norm exceeds epsilon."
    lossnet_variant: LossVariant | None = LossVariant.REGRESSION

    def __init__(self, tau: float, epsilon: float) -> None:
        super().__init__(threshold=tau, epsilon=epsilon)
        self.tau = tau


class SafeDAggerGradientStrategy(GatedStrategy):
    name: str = StrategyKind.SAFEDAGGER_GRADIENT.value
    description: str = "SafeDAgger rule, or query when the probability gradient exceeds epsilon."
    lossnet_variant: LossVariant | None = LossVariant.CLASSIFIER

    def __init__(self, epsilon: float) -> None:
        super().__init__(threshold=CLASSIFIER_QUERY_PROBABILITY, epsilon=epsilon)


__all__ = [
    "GatedStrategy",
    "LossGradientStrategy",
    "LossStrategy",
    "SafeDAggerGradientStrategy",
    "SafeDAggerStrategy",
]
