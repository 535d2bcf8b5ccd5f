"""
Evaluation and the reported metrics: loss-vs-expert and query efficiency.

Loss is measured in reward units as ``expert mean - agent mean`` over the same
evaluation episodes (per-episode total reward), so it is zero for an agent that
matches the expert and negative for one that beats it. Query efficiency is the
reward gained over the supervised baseline per ten thousand expert queries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.environments.abstract import EpisodicEnvironment
from src.environments.rollout import PolicyFn, episode_reward

EFFICIENCY_SCALE = 1e4


@dataclass(frozen=True)
class EvalStats:
    mean: float
    std: float
    rewards: tuple[float, ...]


@dataclass(frozen=True)
class IterationMetrics:
    iteration: int
    mean_loss_vs_expert: float
    loss_std: float
    cumulative_queries: int
    efficiency: float | None = None


def evaluate(
    policy: PolicyFn, env: EpisodicEnvironment, trials: int, rng: np.random.Generator
) -> EvalStats:
    """Mean and sample standard deviation of episode reward over ``trials`` episodes."""
    if trials < 2:
        raise ValueError(f"trials must be >= 2 for a sample std, got {trials}")
    rewards = np.array([episode_reward(env, policy, rng) for _ in range(trials)])
    return EvalStats(float(rewards.mean()), float(rewards.std(ddof=1)), tuple(rewards.tolist()))


def loss_vs_expert(agent_mean_reward: float, expert_mean_reward: float) -> float:
    if not (np.isfinite(agent_mean_reward) and np.isfinite(expert_mean_reward)):
        raise ValueError("rewards must be finite")
    return expert_mean_reward - agent_mean_reward


def query_efficiency(
    agent_loss: float,
    supervised_loss: float,
    query_count: int,
    scale: float = EFFICIENCY_SCALE,
) -> float | None:
    """``scale * (supervised_loss - agent_loss) / query_count``; None when nothing was queried."""
    if query_count <= 0:
        return None
    return scale * (supervised_loss - agent_loss) / query_count


__all__ = [
    "EFFICIENCY_SCALE",
    "EvalStats",
    "IterationMetrics",
    "evaluate",
    "loss_vs_expert",
    "query_efficiency",
]
