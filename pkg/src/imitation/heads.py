"""
Primary policy network, the two loss-network variants and the risk signals.

``Policy`` maps observations to actions. ``LossNet`` looks at ``[s; a_hat]`` and
either regresses the discrepancy vector ``a* - a_hat`` (its scalar estimate is
the L2 norm of that prediction) or classifies whether ``||a* - a_hat|| > tau``
(its scalar estimate is the predicted probability). The gradient-norm risk
proxy differentiates that same scalar w.r.t. the concatenated input.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from enum import StrEnum

import numpy as np

from src.aggregation.dataset import Dataset, DatasetView, split
from src.exceptions import ShapeError
from src.nn.mlp import Mlp, forward, identity_head, init_mlp, input_gradient, l2_norm_head
from src.nn.training import TrainConfig, train
from src.utils.logging import get_logger

log = get_logger(__name__)

POLICY_HIDDEN: tuple[int, ...] = (128, 128, 32, 8)
LOSSNET_HIDDEN: tuple[int, ...] = (128, 128, 64, 64, 32, 32, 16, 16, 8)
DEFAULT_DROPOUT = 0.2
CLASSIFIER_QUERY_PROBABILITY = 0.5


class LossVariant(StrEnum):
    REGRESSION = "regression"
    CLASSIFIER = "classifier"


@dataclass(frozen=True)
class Policy:
    net: Mlp
    val_loss: float | None = None

    @property
    def obs_dim(self) -> int:
        return self.net.input_dim

    @property
    def action_dim(self) -> int:
        return self.net.output_dim

    def __call__(self, observation: np.ndarray) -> np.ndarray:
        return propose_action(self, observation)


@dataclass(frozen=True)
class LossNet:
    net: Mlp
    variant: LossVariant
    tau: float
    obs_dim: int
    val_loss: float | None = None
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        action_dim = self.net.input_dim - self.obs_dim
        if action_dim <= 0:
            raise ShapeError(f"loss net input {self.net.input_dim} leaves no room for actions")
        expected_out = action_dim if self.variant is LossVariant.REGRESSION else 1
        if self.net.output_dim != expected_out:
            raise ShapeError(
                f"{self.variant} loss net must output {expected_out} values, got {self.net.output_dim}"
            )
        expected_head = "identity" if self.variant is LossVariant.REGRESSION else "logistic"
        if self.net.output_activation != expected_head:
            raise ShapeError(f"{self.variant} loss net needs a {expected_head} output head")

    @property
    def action_dim(self) -> int:
        return self.net.input_dim - self.obs_dim


def build_policy(
    obs_dim: int,
    action_dim: int,
    rng: np.random.Generator,
    hidden: Sequence[int] = POLICY_HIDDEN,
    dropout_rate: float = DEFAULT_DROPOUT,
) -> Policy:
    return Policy(init_mlp((obs_dim, *hidden, action_dim), rng, dropout_rate))


def build_lossnet(
    obs_dim: int,
    action_dim: int,
    variant: LossVariant,
    tau: float,
    rng: np.random.Generator,
    hidden: Sequence[int] = LOSSNET_HIDDEN,
    dropout_rate: float = DEFAULT_DROPOUT,
) -> LossNet:
    if variant is LossVariant.REGRESSION:
        net = init_mlp((obs_dim + action_dim, *hidden, action_dim), rng, dropout_rate)
    else:
        net = init_mlp((obs_dim + action_dim, *hidden, 1), rng, dropout_rate, "logistic")
    return LossNet(net=net, variant=variant, tau=tau, obs_dim=obs_dim)


def propose_action(policy: Policy, observation: np.ndarray) -> np.ndarray:
    """Evaluation-mode action; clamping to bounds is left to the environment."""
    obs = np.asarray(observation, dtype=np.float64)
    if obs.shape != (policy.obs_dim,):
        raise ShapeError(f"observation shape {obs.shape} != ({policy.obs_dim},)", layer=0)
    action, _ = forward(policy.net, obs)
    return action


def _lossnet_input(lossnet: LossNet, observation: np.ndarray, action: np.ndarray) -> np.ndarray:
    obs = np.asarray(observation, dtype=np.float64)
    act = np.asarray(action, dtype=np.float64)
    if obs.shape[-1] != lossnet.obs_dim or act.shape[-1] != lossnet.action_dim:
        raise ShapeError(
            f"loss net expects ({lossnet.obs_dim}, {lossnet.action_dim}) dims, "
            f"got ({obs.shape[-1]}, {act.shape[-1]})",
            layer=0,
        )
    return np.concatenate([obs, act], axis=-1)


def loss_estimates(lossnet: LossNet, observations: np.ndarray, actions: np.ndarray) -> np.ndarray:
    """Vectorized ``loss_estimate`` over rows of observations and actions."""
    output, _ = forward(lossnet.net, _lossnet_input(lossnet, observations, actions))
    output = np.atleast_2d(output)
    if lossnet.variant is LossVariant.REGRESSION:
        return np.linalg.norm(output, axis=1)
    return output[:, 0]


def loss_estimate(lossnet: LossNet, observation: np.ndarray, action: np.ndarray) -> float:
    """The scalar l_hat: predicted discrepancy norm, or probability of exceeding tau."""
    return float(loss_estimates(lossnet, np.atleast_2d(observation), np.atleast_2d(action))[0])


def risk_gradient_norm(lossnet: LossNet, observation: np.ndarray, action: np.ndarray) -> float:
    """``|| d l_hat / d[s; a_hat] ||``; zero where the norm scalarization is undefined."""
    x = _lossnet_input(lossnet, observation, action)
    head = l2_norm_head if lossnet.variant is LossVariant.REGRESSION else identity_head
    gradient = input_gradient(lossnet.net, x, head)
    return float(np.linalg.norm(gradient.value))


def fit_policy(
    policy: Policy, train_view: DatasetView, val_view: DatasetView, cfg: TrainConfig
) -> Policy:
    """Regress expert actions on states; the returned policy carries its best val loss."""
    val = (val_view.states, val_view.expert_actions) if len(val_view) else None
    result = train(
        policy.net, (train_view.states, train_view.expert_actions), val, "regression", cfg
    )
    return Policy(result.net, val_loss=result.best_val_loss)


def lossnet_targets(lossnet: LossNet, view: DatasetView) -> np.ndarray:
    difference = view.expert_actions - view.proposed_actions
    if lossnet.variant is LossVariant.REGRESSION:
        return difference
    return (np.linalg.norm(difference, axis=1) > lossnet.tau).astype(np.float64)


def fit_lossnet(
    lossnet: LossNet,
    dataset: Dataset,
    cfg: TrainConfig,
    views: tuple[DatasetView, DatasetView] | None = None,
) -> LossNet:
    """
    Train the loss network on the dataset's ``(s, a_hat, a*)`` records.

    ``views`` lets the caller share one train/validation split between the policy
    and the loss network; without it the dataset is split with its own seed.
    """
    train_view, val_view = views if views is not None else split(dataset)
    objective = "regression" if lossnet.variant is LossVariant.REGRESSION else "binary"
    targets = lossnet_targets(lossnet, train_view)
    warnings: list[str] = []
    if lossnet.variant is LossVariant.CLASSIFIER and np.unique(targets).size < 2:
        message = f"classifier labels are all {int(targets[0]) if targets.size else 'absent'}"
        warnings.append(message)
        log.warning("[LOSSNET] degenerate labels", extra={"detail": message, "records": len(train_view)})

    inputs = np.concatenate([train_view.states, train_view.proposed_actions], axis=1)
    val = None
    if len(val_view):
        val_inputs = np.concatenate([val_view.states, val_view.proposed_actions], axis=1)
        val = (val_inputs, lossnet_targets(lossnet, val_view))
    result = train(lossnet.net, (inputs, targets), val, objective, cfg)
    return replace(lossnet, net=result.net, val_loss=result.best_val_loss, warnings=tuple(warnings))


__all__ = [
    "CLASSIFIER_QUERY_PROBABILITY",
    "LOSSNET_HIDDEN",
    "POLICY_HIDDEN",
    "LossNet",
    "LossVariant",
    "Policy",
    "build_lossnet",
    "build_policy",
    "fit_lossnet",
    "fit_policy",
    "loss_estimate",
    "loss_estimates",
    "lossnet_targets",
    "propose_action",
    "risk_gradient_norm",
]
