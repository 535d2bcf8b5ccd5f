"""
Validated configuration of one experiment run.
"""

from __future__ import annotations

from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, PositiveInt, field_validator

from src.environments import available_environments
from src.imitation.heads import DEFAULT_DROPOUT, LOSSNET_HIDDEN, POLICY_HIDDEN
from src.nn.training import UINT64_MAX, TrainConfig
from src.strategies import (
    FAIR_COIN,
    NEEDS_EPSILON,
    NEEDS_LABEL_TAU,
    NEEDS_P_QUERY,
    NEEDS_TAU,
    StrategyKind,
)


class ExperimentConfig(BaseModel):
    """
    Everything that determines a run; ``(config, seed)`` reproduces it bit for bit.

    ``tau``/``epsilon`` may be left unset for strategies that need them; the CLI
    and the suite fill them from ``calibrate_thresholds`` before running.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    env: str
    strategy: StrategyKind
    tau: float | None = Field(None, gt=0)
    epsilon: float | None = Field(None, gt=0)
    p_query: float = Field(0.3, ge=0.0, le=1.0)
    hybrid_coin: float = Field(FAIR_COIN, ge=0.0, le=1.0)

    iterations: int = Field(15, ge=1)
    episodes_per_iteration: int = Field(10, ge=1)
    horizon: int | None = Field(None, ge=1)
    bootstrap_episodes: int = Field(5, ge=1)
    eval_trials: int = Field(100, ge=2)
    query_budget: float | None = Field(None, gt=0)
    seed: int = Field(0, ge=0, le=UINT64_MAX)

    policy_train: TrainConfig = Field(default_factory=TrainConfig)
    lossnet_train: TrainConfig = Field(default_factory=TrainConfig)
    policy_hidden: tuple[PositiveInt, ...] = POLICY_HIDDEN
    lossnet_hidden: tuple[PositiveInt, ...] = LOSSNET_HIDDEN
    dropout_rate: float = Field(DEFAULT_DROPOUT, ge=0.0, lt=1.0)
    match_supervised_budget: bool = True
    out_dir: Path | None = None

    @field_validator("env")
    @classmethod
    def _known_env(cls, value: str) -> str:
        if value not in available_environments():
            raise ValueError(
                f"Unknown environment '{value}'. Available: {', '.join(available_environments())}"
            )
        return value

    @property
    def run_name(self) -> str:
        return f"{self.env}-{self.strategy.value}-seed{self.seed}"

    def missing_thresholds(self) -> list[str]:
        missing = []
        if self.tau is None and self.strategy in NEEDS_TAU | NEEDS_LABEL_TAU:
            missing.append("tau")
        if self.epsilon is None and self.strategy in NEEDS_EPSILON:
            missing.append("epsilon")
        return missing

    def unused_fields(self, explicitly_set: set[str] | None = None) -> list[str]:
        """Threshold fields that were set but that this strategy ignores."""
        fields = self.model_fields_set if explicitly_set is None else explicitly_set
        unused = []
        if "tau" in fields and self.strategy not in NEEDS_TAU | NEEDS_LABEL_TAU:
            unused.append("tau")
        if "epsilon" in fields and self.strategy not in NEEDS_EPSILON:
            unused.append("epsilon")
        if "p_query" in fields and self.strategy not in NEEDS_P_QUERY:
            unused.append("p_query")
        if "hybrid_coin" in fields and self.strategy not in NEEDS_P_QUERY - {StrategyKind.RANDOM}:
            unused.append("hybrid_coin")
        if "query_budget" in fields and self.strategy is StrategyKind.SUPERVISED:
            unused.append("query_budget")
        return unused


__all__ = ["ExperimentConfig"]
