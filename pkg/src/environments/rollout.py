"""
Episode helpers on top of the environment contract.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from src.environments.abstract import Environment

PolicyFn = Callable[[np.ndarray], np.ndarray]


def expert_policy(env: Environment) -> PolicyFn:
    """The environment's analytic expert, shaped as an observation -> action map."""

    def act(observation: np.ndarray) -> np.ndarray:
        del observation
        return env.expert_action()

    return act


def random_policy(env: Environment, rng: np.random.Generator) -> PolicyFn:
    low = np.asarray(env.spec.action_low)
    high = np.asarray(env.spec.action_high)

    def act(observation: np.ndarray) -> np.ndarray:
        del observation
        return rng.uniform(low, high)

    return act


@dataclass
class Episode:
    observations: list[np.ndarray] = field(default_factory=list)
    rewards: list[float] = field(default_factory=list)
    failed: bool = False

    @property
    def total_reward(self) -> float:
        return float(sum(self.rewards))

    @property
    def length(self) -> int:
        return len(self.rewards)


def run_episode(env: Environment, policy: PolicyFn, rng: np.random.Generator) -> Episode:
    """Reset with ``rng`` and act with ``policy`` until the episode ends."""
    episode = Episode()
    observation = env.reset(rng)
    done = False
    while not done:
        episode.observations.append(observation)
        result = env.step(policy(observation))
        episode.rewards.append(result.reward)
        observation = result.observation
        done = result.done
        episode.failed = result.failed
    return episode


def episode_reward(env: Environment, policy: PolicyFn, rng: np.random.Generator) -> float:
    """Sum of per-step rewards of one episode."""
    return run_episode(env, policy, rng).total_reward


__all__ = ["Episode", "PolicyFn", "episode_reward", "expert_policy", "random_policy", "run_episode"]
