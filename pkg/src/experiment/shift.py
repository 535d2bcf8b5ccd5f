"""
Covariate-shift witness: how far a policy's visited states drift from the expert's.
"""

from __future__ import annotations

import numpy as np

from src.environments.abstract import EpisodicEnvironment
from src.environments.rollout import PolicyFn, run_episode

SHIFT_SAMPLES = 1000
_CHUNK = 256


def collect_states(
    env: EpisodicEnvironment, policy: PolicyFn, episodes: int, rng: np.random.Generator
) -> np.ndarray:
    """Stack every observation visited over ``episodes`` rollouts of ``policy``."""
    visited = [np.stack(run_episode(env, policy, rng).observations) for _ in range(episodes)]
    return np.concatenate(visited)


def nearest_neighbor_distances(queries: np.ndarray, reference: np.ndarray) -> np.ndarray:
    out = np.empty(len(queries))
    for start in range(0, len(queries), _CHUNK):
        block = queries[start : start + _CHUNK]
        d2 = ((block[:, None, :] - reference[None, :, :]) ** 2).sum(axis=-1)
        out[start : start + _CHUNK] = np.sqrt(d2.min(axis=1))
    return out


def visitation_shift(
    visited: np.ndarray,
    expert_visited: np.ndarray,
    rng: np.random.Generator,
    samples: int = SHIFT_SAMPLES,
) -> float:
    """Mean distance from up to ``samples`` visited states to their nearest expert-visited state."""
    if len(visited) == 0 or len(expert_visited) == 0:
        raise ValueError("both state sets must be non-empty")
    if len(visited) > samples:
        visited = visited[rng.choice(len(visited), size=samples, replace=False)]
    return float(nearest_neighbor_distances(visited, expert_visited).mean())


__all__ = ["SHIFT_SAMPLES", "collect_states", "nearest_neighbor_distances", "visitation_shift"]
