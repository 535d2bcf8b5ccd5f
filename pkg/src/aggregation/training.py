"""
Bootstrap demonstrations, per-iteration retraining and final model selection.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, replace

import numpy as np

from src.aggregation.dataset import Dataset, DemoRecord, RecordSource, aggregate, split
from src.environments.abstract import EpisodicEnvironment
from src.imitation.heads import LossNet, Policy, fit_lossnet, fit_policy
from src.nn.mlp import init_mlp
from src.nn.training import TrainConfig
from src.utils.logging import get_logger
from src.utils.seeding import Stream, derive_seed, make_rng

log = get_logger(__name__)


def bootstrap(
    env: EpisodicEnvironment, episodes: int, rng: np.random.Generator, split_seed: int = 0
) -> Dataset:
    """Expert-driven rollouts; every visited state becomes a bootstrap record."""
    if episodes < 1:
        raise ValueError(f"episodes must be >= 1, got {episodes}")
    dataset = Dataset(obs_dim=env.spec.obs_dim, action_dim=env.spec.action_dim, split_seed=split_seed)
    for _ in range(episodes):
        observation = env.reset(rng)
        while not env.done:
            expert = env.expert_action()
            aggregate(
                dataset,
                DemoRecord(observation, expert, expert, iteration=0, source=RecordSource.BOOTSTRAP),
            )
            observation = env.step(expert).observation
    log.debug("[BOOTSTRAP] collected", extra={"episodes": episodes, "records": len(dataset)})
    return dataset


@dataclass(frozen=True)
class Snapshot:
    """Heads trained after ``iteration``; ``val_loss`` is the policy's best validation loss."""

    iteration: int
    policy: Policy
    lossnet: LossNet | None
    val_loss: float | None


@dataclass(frozen=True)
class RetrainPlan:
    seed: int
    policy_train: TrainConfig
    lossnet_train: TrainConfig
    val_fraction: float = 0.2


def _fresh_policy(policy: Policy, seed: int, iteration: int) -> Policy:
    net = policy.net
    rng = make_rng(seed, Stream.POLICY_INIT, iteration)
    return Policy(init_mlp(net.layer_sizes, rng, net.dropout_rate, net.output_activation))


def _fresh_lossnet(lossnet: LossNet, seed: int, iteration: int) -> LossNet:
    net = lossnet.net
    rng = make_rng(seed, Stream.LOSSNET_INIT, iteration)
    fresh = init_mlp(net.layer_sizes, rng, net.dropout_rate, net.output_activation)
    return replace(lossnet, net=fresh, val_loss=None, warnings=())


def retrain(
    dataset: Dataset,
    policy: Policy,
    lossnet: LossNet | None,
    plan: RetrainPlan,
    iteration: int,
) -> Snapshot:
    """
    Fit new heads on the whole aggregated dataset.

    ``policy`` and ``lossnet`` only provide architectures: both are re-initialized
    from ``(plan.seed, iteration)`` and share one train/validation split.
    """
    train_view, val_view = split(
        dataset, plan.val_fraction, make_rng(plan.seed, Stream.SPLIT, iteration)
    )
    if not len(train_view):
        raise ValueError("retrain needs a non-empty training split")

    policy_cfg = plan.policy_train.model_copy(
        update={"seed": derive_seed(plan.seed, Stream.TRAIN, iteration, 0)}
    )
    new_policy = fit_policy(_fresh_policy(policy, plan.seed, iteration), train_view, val_view, policy_cfg)

    new_lossnet = None
    if lossnet is not None:
        lossnet_cfg = plan.lossnet_train.model_copy(
            update={"seed": derive_seed(plan.seed, Stream.TRAIN, iteration, 1)}
        )
        new_lossnet = fit_lossnet(
            _fresh_lossnet(lossnet, plan.seed, iteration),
            dataset,
            lossnet_cfg,
            views=(train_view, val_view),
        )

    log.info(
        "[RETRAIN] heads fitted",
        extra={
            "iteration": iteration,
            "records": len(dataset),
            "train": len(train_view),
            "val": len(val_view),
            "policy_val_loss": new_policy.val_loss,
            "lossnet_val_loss": new_lossnet.val_loss if new_lossnet else None,
        },
    )
    return Snapshot(iteration, new_policy, new_lossnet, new_policy.val_loss)


def select_best(snapshots: Sequence[Snapshot]) -> Snapshot:
    """Lowest validation loss; ties go to the latest iteration."""
    if not snapshots:
        raise ValueError("select_best needs at least one snapshot")
    best = snapshots[0]
    for snapshot in snapshots[1:]:
        if _score(snapshot) <= _score(best):
            best = snapshot
    return best


def _score(snapshot: Snapshot) -> float:
    return np.inf if snapshot.val_loss is None else snapshot.val_loss


__all__ = ["RetrainPlan", "Snapshot", "bootstrap", "retrain", "select_best"]
