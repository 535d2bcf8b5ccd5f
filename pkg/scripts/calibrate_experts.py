"""
Expert sanity check for the benchmark environments.

Rolls out the analytic expert and a uniform random policy for a number of
episodes per environment, writes every episode reward to a CSV and prints the
expert band (mean +/- 3 std) next to the random baseline.
"""

from __future__ import annotations

import csv
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Annotated

import numpy as np
import typer
from rich import box
from rich.console import Console
from rich.table import Table

from src.environments import available_environments, episode_reward, expert_policy, make_env, random_policy
from src.utils.seeding import Stream, make_rng

app = typer.Typer(help="Roll out the expert and a random policy and report their reward bands.")

BAND_WIDTH = 3.0
CSV_HEADER = ("env", "policy", "episode", "reward")


@dataclass(frozen=True)
class RewardBand:
    env: str
    policy: str
    rewards: tuple[float, ...]

    @property
    def mean(self) -> float:
        return float(np.mean(self.rewards))

    @property
    def std(self) -> float:
        return float(np.std(self.rewards, ddof=1)) if len(self.rewards) > 1 else 0.0

    @property
    def band(self) -> tuple[float, float]:
        return self.mean - BAND_WIDTH * self.std, self.mean + BAND_WIDTH * self.std


def measure(env_name: str, episodes: int, seed: int) -> tuple[RewardBand, RewardBand]:
    """Expert and random reward bands; both policies see the same initial states."""
    env = make_env(env_name)
    expert_rng = make_rng(seed, Stream.CALIBRATION, 0)
    random_rng = make_rng(seed, Stream.CALIBRATION, 0)
    action_rng = make_rng(seed, Stream.CALIBRATION, 1)
    expert = [episode_reward(env, expert_policy(env), expert_rng) for _ in range(episodes)]
    uniform = random_policy(env, action_rng)
    rand = [episode_reward(env, uniform, random_rng) for _ in range(episodes)]
    return RewardBand(env_name, "expert", tuple(expert)), RewardBand(env_name, "random", tuple(rand))


def write_rewards_csv(bands: list[RewardBand], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for band in bands:
            for episode, reward in enumerate(band.rewards):
                writer.writerow([band.env, band.policy, episode, repr(reward)])
    return path


@app.command()
def main(
    envs: Annotated[
        list[str] | None,
        typer.Option("--env", "-e", help="Environment to check (repeatable); default all."),
    ] = None,
    episodes: Annotated[
        int,
        typer.Option("--episodes", "-n", min=2, help="Episodes per policy."),
    ] = 100,
    seed: Annotated[
        int,
        typer.Option("--seed", min=0, help="Deterministic RNG seed."),
    ] = 0,
    output: Annotated[
        Path,
        typer.Option("--output", "-o", help="CSV of per-episode rewards."),
    ] = Path("results/expert_calibration.csv"),
) -> None:
    """
    Measure expert and random reward bands per environment.
    """
    names = envs or available_environments()
    unknown = sorted(set(names) - set(available_environments()))
    if unknown:
        raise typer.BadParameter(f"unknown environments: {', '.join(unknown)}", param_hint="'--env'")

    bands: list[RewardBand] = []
    table = Table(title="Expert calibration", box=box.ROUNDED)
    table.add_column("Env", style="cyan")
    table.add_column("Policy", style="cyan")
    table.add_column("Mean ± std", justify="right", style="green")
    table.add_column(f"Band (±{BAND_WIDTH:g} std)", justify="right")
    for name in names:
        for band in measure(name, episodes, seed):
            bands.append(band)
            low, high = band.band
            table.add_row(name, band.policy, f"{band.mean:.3f} ± {band.std:.3f}", f"[{low:.3f}, {high:.3f}]")

    Console().print(table)
    typer.echo(f"Rewards written to {write_rewards_csv(bands, output)}")


if __name__ == "__main__":
    try:
        app()
    except KeyboardInterrupt:
        typer.echo("Cancelled by user.", err=True)
        sys.exit(130)
