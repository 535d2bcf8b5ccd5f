"""
Pytest configuration for the RadGrad benchmark.

Provides fixtures for:
- Deterministic random streams
- Tiny network/training settings so experiment-level tests stay fast
- A factory for small experiment configs
- Settings cache isolation
"""

from __future__ import annotations

from collections.abc import Callable, Generator
from pathlib import Path
from typing import Any

import numpy as np
import pytest

from src.config import get_settings
from src.environments import CliffCorridor, Reach2D
from src.experiment.config import ExperimentConfig
from src.nn.training import TrainConfig

TEST_SEED = 1234
TINY_HIDDEN = (8,)
TINY_EPOCHS = 3
TINY_PATIENCE = 1
TINY_EVAL_TRIALS = 2


@pytest.fixture(autouse=True)
def _fresh_settings() -> Generator[None, None, None]:
    """Settings are cached per process; tests that patch RADGRAD_* must not leak."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(TEST_SEED)


@pytest.fixture
def reach2d() -> Reach2D:
    return Reach2D()


@pytest.fixture
def cliff() -> CliffCorridor:
    return CliffCorridor()


@pytest.fixture(scope="session")
def tiny_train_cfg() -> TrainConfig:
    return TrainConfig(max_epochs=TINY_EPOCHS, patience=TINY_PATIENCE)


@pytest.fixture
def make_config(tiny_train_cfg: TrainConfig, tmp_path: Path) -> Callable[..., ExperimentConfig]:
    """
    Build an ``ExperimentConfig`` with tiny networks and few epochs.

    Keyword arguments override any field.
    """

    def _make(**overrides: Any) -> ExperimentConfig:
        fields: dict[str, Any] = {
            "env": "reach2d",
            "strategy": "dagger",
            "iterations": 1,
            "episodes_per_iteration": 2,
            "eval_trials": TINY_EVAL_TRIALS,
            "seed": 1,
            "policy_hidden": TINY_HIDDEN,
            "lossnet_hidden": TINY_HIDDEN,
            "policy_train": tiny_train_cfg,
            "lossnet_train": tiny_train_cfg,
            "out_dir": tmp_path / "results",
        }
        fields.update(overrides)
        return ExperimentConfig(**fields)

    return _make
