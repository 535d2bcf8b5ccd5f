"""
Query strategies for the nine algorithms and their name registry.

This module re-exports the interfaces and concrete strategy classes so callers
can import from ``src.strategies`` directly, and builds strategies from their
CLI identifiers.
"""

from __future__ import annotations

from collections.abc import Callable

import numpy as np

from src.exceptions import ConfigurationError
from src.imitation.heads import LossNet, LossVariant
from src.strategies.abstract import (
    FiredRule,
    QueryDecision,
    QueryStrategy,
    QueryStreams,
    StrategyKind,
    UniformSource,
    execute_choice,
    require_lossnet,
)
from src.strategies.baseline import DAggerStrategy, RandomStrategy, SupervisedStrategy
from src.strategies.gated import (
    GatedStrategy,
    LossGradientStrategy,
    LossStrategy,
    SafeDAggerGradientStrategy,
    SafeDAggerStrategy,
)
from src.strategies.hybrid import FAIR_COIN, HybridStrategy

NEEDS_TAU = frozenset({StrategyKind.LOSS, StrategyKind.LOSS_GRADIENT, StrategyKind.LOSS_GRADIENT_RANDOM})
NEEDS_LABEL_TAU = frozenset(
    {
        StrategyKind.SAFEDAGGER,
        StrategyKind.SAFEDAGGER_GRADIENT,
        StrategyKind.SAFEDAGGER_GRADIENT_RANDOM,
    }
)
NEEDS_EPSILON = frozenset(
    {
        StrategyKind.LOSS_GRADIENT,
        StrategyKind.SAFEDAGGER_GRADIENT,
        StrategyKind.LOSS_GRADIENT_RANDOM,
        StrategyKind.SAFEDAGGER_GRADIENT_RANDOM,
    }
)
NEEDS_P_QUERY = frozenset(
    {StrategyKind.RANDOM, StrategyKind.LOSS_GRADIENT_RANDOM, StrategyKind.SAFEDAGGER_GRADIENT_RANDOM}
)

_LOSSNET_VARIANTS: dict[StrategyKind, LossVariant | None] = {
    StrategyKind.SUPERVISED: None,
    StrategyKind.DAGGER: None,
    StrategyKind.RANDOM: None,
    StrategyKind.LOSS: LossVariant.REGRESSION,
    StrategyKind.LOSS_GRADIENT: LossVariant.REGRESSION,
    StrategyKind.LOSS_GRADIENT_RANDOM: LossVariant.REGRESSION,
    StrategyKind.SAFEDAGGER: LossVariant.CLASSIFIER,
    StrategyKind.SAFEDAGGER_GRADIENT: LossVariant.CLASSIFIER,
    StrategyKind.SAFEDAGGER_GRADIENT_RANDOM: LossVariant.CLASSIFIER,
}


def available_strategies() -> list[str]:
    return [kind.value for kind in StrategyKind]


def lossnet_variant_for(kind: StrategyKind | str) -> LossVariant | None:
    return _LOSSNET_VARIANTS[StrategyKind(kind)]


def _require(kind: StrategyKind, name: str, value: float | None) -> float:
    if value is None:
        raise ConfigurationError(f"strategy '{kind}' needs {name}")
    return value


def resolve_strategy(
    kind: StrategyKind | str,
    tau: float | None = None,
    epsilon: float | None = None,
    p_query: float = 0.3,
    hybrid_coin: float = FAIR_COIN,
) -> QueryStrategy:
    """Build the strategy named ``kind``; thresholds it needs must be supplied."""
    try:
        kind = StrategyKind(kind)
    except ValueError as exc:
        raise ConfigurationError(
            f"Unknown strategy '{kind}'. Available: {', '.join(available_strategies())}"
        ) from exc

    builders: dict[StrategyKind, Callable[[], QueryStrategy]] = {
        StrategyKind.SUPERVISED: SupervisedStrategy,
        StrategyKind.DAGGER: DAggerStrategy,
        StrategyKind.RANDOM: lambda: RandomStrategy(p_query),
        StrategyKind.LOSS: lambda: LossStrategy(_require(kind, "tau", tau)),
        StrategyKind.SAFEDAGGER: SafeDAggerStrategy,
        StrategyKind.LOSS_GRADIENT: lambda: LossGradientStrategy(
            _require(kind, "tau", tau), _require(kind, "epsilon", epsilon)
        ),
        StrategyKind.SAFEDAGGER_GRADIENT: lambda: SafeDAggerGradientStrategy(
            _require(kind, "epsilon", epsilon)
        ),
        StrategyKind.LOSS_GRADIENT_RANDOM: lambda: HybridStrategy(
            kind,
            LossGradientStrategy(_require(kind, "tau", tau), _require(kind, "epsilon", epsilon)),
            RandomStrategy(p_query),
            hybrid_coin,
        ),
        StrategyKind.SAFEDAGGER_GRADIENT_RANDOM: lambda: HybridStrategy(
            kind,
            SafeDAggerGradientStrategy(_require(kind, "epsilon", epsilon)),
            RandomStrategy(p_query),
            hybrid_coin,
        ),
    }
    return builders[kind]()


def should_query(
    strategy: QueryStrategy,
    lossnet: LossNet | None,
    observation: np.ndarray,
    proposed_action: np.ndarray,
    streams: QueryStreams,
) -> QueryDecision:
    """One timestep's verdict; rejects a missing or mismatched loss net up front."""
    if strategy.lossnet_variant is not None:
        require_lossnet(strategy, lossnet)
    return strategy.decide(lossnet, observation, proposed_action, streams)


__all__ = [
    "FAIR_COIN",
    "NEEDS_EPSILON",
    "NEEDS_LABEL_TAU",
    "NEEDS_P_QUERY",
    "NEEDS_TAU",
    "DAggerStrategy",
    "FiredRule",
    "GatedStrategy",
    "HybridStrategy",
    "LossGradientStrategy",
    "LossStrategy",
    "QueryDecision",
    "QueryStrategy",
    "QueryStreams",
    "RandomStrategy",
    "SafeDAggerGradientStrategy",
    "SafeDAggerStrategy",
    "StrategyKind",
    "SupervisedStrategy",
    "UniformSource",
    "available_strategies",
    "execute_choice",
    "lossnet_variant_for",
    "resolve_strategy",
    "should_query",
]
