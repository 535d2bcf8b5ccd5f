"""
Environment contract shared by the benchmark tasks.

Concrete environments subclass ``EpisodicEnvironment`` and supply the task
dynamics (``_sample_initial_state``, ``_transition``), the observation encoding
and an analytic expert. The base class owns the episodic bookkeeping every task
must honour:

- actions are clamped to ``EnvSpec.action_bounds`` before dynamics;
- ``done`` fires at ``max_steps`` or when the task reports a failure;
- stepping a finished episode raises ``ContractError`` until ``reset``.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

from src.exceptions import ContractError, ShapeError


@dataclass(frozen=True)
class EnvSpec:
    name: str
    obs_dim: int
    action_dim: int
    max_steps: int
    action_low: tuple[float, ...]
    action_high: tuple[float, ...]
    reward_range: tuple[float, float]

    @property
    def action_bounds(self) -> list[tuple[float, float]]:
        return list(zip(self.action_low, self.action_high, strict=True))

    def clamp(self, action: np.ndarray) -> np.ndarray:
        return np.clip(action, self.action_low, self.action_high)


@dataclass(frozen=True)
class StepResult:
    observation: np.ndarray
    reward: float
    done: bool
    failed: bool = False


@runtime_checkable
class Environment(Protocol):
    """What the experiment loop relies on; ``EpisodicEnvironment`` implements it."""

    spec: EnvSpec

    def reset(self, rng: np.random.Generator) -> np.ndarray: ...

    def step(self, action: np.ndarray) -> StepResult: ...

    def expert_action(self) -> np.ndarray: ...

    @property
    def done(self) -> bool: ...

    @property
    def steps_taken(self) -> int: ...


class EpisodicEnvironment(ABC):
    spec: EnvSpec

    def __init__(self, spec: EnvSpec) -> None:
        self.spec = spec
        self._state: np.ndarray | None = None
        self._steps = 0
        self._done = True

    @abstractmethod
    def _sample_initial_state(self, rng: np.random.Generator) -> np.ndarray: ...

    @abstractmethod
    def _transition(self, state: np.ndarray, action: np.ndarray) -> tuple[np.ndarray, float, bool]:
        """Return ``(next_state, reward, failed)`` for an already-clamped action."""

    @abstractmethod
    def _observe(self, state: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _expert(self, state: np.ndarray) -> np.ndarray: ...

    @property
    def done(self) -> bool:
        return self._done

    @property
    def steps_taken(self) -> int:
        return self._steps

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        self._state = self._sample_initial_state(rng)
        self._steps = 0
        self._done = False
        return self._observe(self._state)

    def step(self, action: np.ndarray) -> StepResult:
        if self._done or self._state is None:
            raise ContractError(f"{self.spec.name}: step() called on a finished episode; reset first")
        a = np.asarray(action, dtype=np.float64)
        if a.shape != (self.spec.action_dim,):
            raise ShapeError(f"{self.spec.name}: action shape {a.shape} != ({self.spec.action_dim},)")
        next_state, reward, failed = self._transition(self._state, self.spec.clamp(a))
        self._state = next_state
        self._steps += 1
        self._done = failed or self._steps >= self.spec.max_steps
        return StepResult(self._observe(next_state), float(reward), self._done, failed)

    def expert_action(self) -> np.ndarray:
        if self._done or self._state is None:
            raise ContractError(f"{self.spec.name}: no expert action for a finished episode")
        return self._expert(self._state)

    def observation(self) -> np.ndarray:
        if self._state is None:
            raise ContractError(f"{self.spec.name}: environment has not been reset")
        return self._observe(self._state)

    def get_state(self) -> np.ndarray:
        if self._state is None:
            raise ContractError(f"{self.spec.name}: environment has not been reset")
        return self._state.copy()

    def set_state(self, state: np.ndarray, steps_taken: int = 0) -> np.ndarray:
        """Place the environment in ``state`` with a live episode; returns the observation."""
        self._state = np.array(state, dtype=np.float64, copy=True)
        self._steps = steps_taken
        self._done = steps_taken >= self.spec.max_steps
        return self._observe(self._state)


__all__ = ["EnvSpec", "Environment", "EpisodicEnvironment", "StepResult"]
