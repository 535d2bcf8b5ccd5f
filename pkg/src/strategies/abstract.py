"""
Query-strategy interface and the decision record every strategy returns.

A strategy looks at the loss network's view of the current ``(state, proposed
action)`` pair and decides whether the expert is queried this timestep. The
returned ``QueryDecision`` names the rule that fired so runs can be audited and
replayed: the same inputs and the same stream draws always yield the same
decision.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
from typing import Protocol, runtime_checkable

import numpy as np

from src.exceptions import ConfigurationError, ContractError
from src.imitation.heads import LossNet, LossVariant


class StrategyKind(StrEnum):
    SUPERVISED = "supervised"
    DAGGER = "dagger"
    LOSS = "loss"
    SAFEDAGGER = "safedagger"
    LOSS_GRADIENT = "loss-gradient"
    SAFEDAGGER_GRADIENT = "safedagger-gradient"
    RANDOM = "random"
    LOSS_GRADIENT_RANDOM = "loss-gradient-random"
    SAFEDAGGER_GRADIENT_RANDOM = "safedagger-gradient-random"


class FiredRule(StrEnum):
    NONE = "none"
    THRESHOLD = "threshold"
    GRADIENT = "gradient"
    RANDOM = "random"
    ALWAYS = "always"


@dataclass(frozen=True)
class QueryDecision:
    """
    Verdict for one timestep.

    ``l_hat`` and ``grad_norm`` are present only when the strategy computed them.
    ``coin`` records the hybrid coin outcome (``"heads"`` picks the gradient rule).
    """

    query: bool
    fired_rule: FiredRule
    l_hat: float | None = None
    grad_norm: float | None = None
    coin: str | None = None

    def __post_init__(self) -> None:
        if (self.fired_rule is FiredRule.NONE) == self.query:
            raise ContractError(
                f"fired_rule={self.fired_rule} is inconsistent with query={self.query}"
            )


class UniformSource(Protocol):
    """Anything with ``random() -> float`` in [0, 1); a numpy Generator qualifies."""

    def random(self) -> float: ...


@dataclass(frozen=True)
class QueryStreams:
    """The per-timestep uniform draw and the hybrid coin come from separate streams."""

    query: UniformSource
    coin: UniformSource


@runtime_checkable
class QueryStrategy(Protocol):
    """
    Common interface of the nine query rules.

    Attributes
    ----------
    name : str
        CLI identifier (a ``StrategyKind`` value).
    description : str
        A human-friendly summary of the rule.
    lossnet_variant : LossVariant | None
        The loss network the rule reads, or None when it needs none.
    """

    name: str
    description: str
    lossnet_variant: LossVariant | None

    def decide(
        self,
        lossnet: LossNet | None,
        observation: np.ndarray,
        proposed_action: np.ndarray,
        streams: QueryStreams,
    ) -> QueryDecision: ...


def require_lossnet(strategy: QueryStrategy, lossnet: LossNet | None) -> LossNet:
    if lossnet is None:
        raise ConfigurationError(f"strategy '{strategy.name}' needs a {strategy.lossnet_variant} loss net")
    if lossnet.variant is not strategy.lossnet_variant:
        raise ConfigurationError(
            f"strategy '{strategy.name}' pairs with a {strategy.lossnet_variant} loss net, got {lossnet.variant}"
        )
    return lossnet


def execute_choice(
    decision: QueryDecision, proposed_action: np.ndarray, expert_action: np.ndarray | None
) -> np.ndarray:
    """The expert action when the expert was queried, otherwise the agent's own."""
    if not decision.query:
        return proposed_action
    if expert_action is None:
        raise ContractError(f"decision fired '{decision.fired_rule}' but no expert action was supplied")
    return expert_action


__all__ = [
    "FiredRule",
    "QueryDecision",
    "QueryStrategy",
    "QueryStreams",
    "StrategyKind",
    "UniformSource",
    "execute_choice",
    "require_lossnet",
]
