from __future__ import annotations

import numpy as np
import pytest

from src.aggregation.dataset import Dataset
from src.aggregation.training import RetrainPlan, Snapshot, bootstrap, retrain, select_best
from src.environments import make_env
from src.imitation.heads import LossNet, LossVariant, Policy, build_lossnet, build_policy
from src.nn.mlp import zeros_mlp
from src.nn.training import TrainConfig, evaluate_loss

QUICK = TrainConfig(max_epochs=5, patience=2)


def _snapshot(iteration: int, val_loss: float | None) -> Snapshot:
    return Snapshot(iteration, Policy(zeros_mlp((2, 1))), None, val_loss)


class TestSelectBest:
    def test_lowest_validation_loss_wins(self) -> None:
        snapshots = [_snapshot(i + 1, v) for i, v in enumerate([0.5, 0.3, 0.4])]
        assert select_best(snapshots).iteration == 2

    def test_single_snapshot(self) -> None:
        assert select_best([_snapshot(1, 0.7)]).iteration == 1

    def test_ties_go_to_the_latest(self) -> None:
        snapshots = [_snapshot(1, 0.2), _snapshot(2, 0.3), _snapshot(3, 0.2)]
        assert select_best(snapshots).iteration == 3

    def test_missing_loss_ranks_last(self) -> None:
        assert select_best([_snapshot(1, 0.9), _snapshot(2, None)]).iteration == 1

    def test_empty(self) -> None:
        with pytest.raises(ValueError):
            select_best([])


class TestRetrain:
    def _inputs(self) -> tuple[Dataset, Policy, LossNet]:
        env = make_env("reach2d", horizon=10)
        dataset = bootstrap(env, 3, np.random.default_rng(0))
        rng = np.random.default_rng(1)
        policy = build_policy(env.spec.obs_dim, env.spec.action_dim, rng, hidden=(8,))
        lossnet = build_lossnet(env.spec.obs_dim, env.spec.action_dim, LossVariant.REGRESSION, 0.1, rng, hidden=(8,))
        return dataset, policy, lossnet

    def test_same_plan_same_heads(self) -> None:
        dataset, policy, lossnet = self._inputs()
        plan = RetrainPlan(seed=7, policy_train=QUICK, lossnet_train=QUICK)
        first = retrain(dataset, policy, lossnet, plan, iteration=1)
        second = retrain(dataset, policy, lossnet, plan, iteration=1)
        assert first.val_loss == second.val_loss
        for a, b in zip(first.policy.net.weights, second.policy.net.weights, strict=True):
            np.testing.assert_array_equal(a, b)
        assert first.lossnet is not None and second.lossnet is not None
        np.testing.assert_array_equal(first.lossnet.net.weights[0], second.lossnet.net.weights[0])

    def test_iterations_reinitialize_differently(self) -> None:
        dataset, policy, lossnet = self._inputs()
        plan = RetrainPlan(seed=7, policy_train=QUICK, lossnet_train=QUICK)
        first = retrain(dataset, policy, None, plan, iteration=1)
        second = retrain(dataset, policy, None, plan, iteration=2)
        assert second.lossnet is None
        assert not np.array_equal(first.policy.net.weights[0], second.policy.net.weights[0])

    def test_fits_expert_actions(self) -> None:
        dataset, policy, _ = self._inputs()
        quiet = TrainConfig(learning_rate=0.01, max_epochs=300, patience=299)
        snapshot = retrain(dataset, policy, None, RetrainPlan(3, quiet, quiet), iteration=1)
        states, targets = dataset.view().states, dataset.view().expert_actions
        before = evaluate_loss(policy.net, states, targets, "regression")
        after = evaluate_loss(snapshot.policy.net, states, targets, "regression")
        assert snapshot.val_loss is not None
        assert after < before
