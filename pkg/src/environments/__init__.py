"""
Benchmark environments and their name registry (CLI identifiers).
"""

from __future__ import annotations

from collections.abc import Callable

from src.environments.abstract import EnvSpec, Environment, EpisodicEnvironment, StepResult
from src.environments.cliff_corridor import CliffCorridor
from src.environments.reach2d import Reach2D
from src.environments.rollout import (
    Episode,
    PolicyFn,
    episode_reward,
    expert_policy,
    random_policy,
    run_episode,
)

_ENV_FACTORIES: dict[str, Callable[[int | None], EpisodicEnvironment]] = {
    "reach2d": Reach2D,
    "cliffcorridor": CliffCorridor,
}


def available_environments() -> list[str]:
    return sorted(_ENV_FACTORIES)


def make_env(name: str, horizon: int | None = None) -> EpisodicEnvironment:
    if name not in _ENV_FACTORIES:
        raise ValueError(f"Unknown environment '{name}'. Available: {', '.join(available_environments())}")
    return _ENV_FACTORIES[name](horizon)


__all__ = [
    "CliffCorridor",
    "EnvSpec",
    "Environment",
    "Episode",
    "EpisodicEnvironment",
    "PolicyFn",
    "Reach2D",
    "StepResult",
    "available_environments",
    "episode_reward",
    "expert_policy",
    "make_env",
    "random_policy",
    "run_episode",
]
