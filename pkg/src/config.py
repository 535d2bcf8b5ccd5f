"""
Process-wide settings for the RadGrad benchmark.

Loaded from ``RADGRAD_*`` environment variables (and an optional ``.env``).
These are defaults for the CLI; per-run choices live in ``ExperimentConfig``.
"""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Application
    log_level: str = Field("INFO")
    json_logs: bool = Field(False)
    results_dir: Path = Field(Path("results"))
    workers: int = Field(1, ge=1)

    # Experiment defaults
    default_seed: int = Field(0, ge=0)
    iterations: int = Field(15, ge=1)
    episodes_per_iteration: int = Field(10, ge=1)
    eval_trials: int = Field(100, ge=2)
    bootstrap_episodes: int = Field(5, ge=1)
    p_query: float = Field(0.3, ge=0.0, le=1.0)

    model_config = SettingsConfigDict(
        env_prefix="RADGRAD_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """
    Retrieve a cached instance of Settings to avoid repeated env parsing.
    """
    return Settings()


__all__ = ["Settings", "get_settings"]
