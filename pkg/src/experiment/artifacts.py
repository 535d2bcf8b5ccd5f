"""
On-disk artifacts of a run: metric CSVs, the summary file and the manifest.

Metric CSV (one per run)::

    # loss = expert mean episode reward - agent mean episode reward (per-episode total, eval_trials episodes)
    iteration,loss,err,total_obs
    1,0.53,0.21,750
    ...

Floats are written with ``repr`` so the same run always produces the same bytes;
the manifest stores a git-style blob hash of each CSV to make that checkable.
"""

from __future__ import annotations

import csv
import hashlib
from collections.abc import Iterable
from datetime import UTC, datetime
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from src.experiment.config import ExperimentConfig
from src.experiment.metrics import IterationMetrics

METRICS_HEADER = ("iteration", "loss", "err", "total_obs")
METRICS_COMMENT = (
    "# loss = expert mean episode reward - agent mean episode reward "
    "(per-episode total reward, eval_trials episodes); err = agent reward sample std"
)
SUMMARY_HEADER = (
    "run",
    "env",
    "algorithm",
    "seed",
    "queries",
    "loss",
    "loss_std",
    "efficiency",
    "status",
    "error",
)


def _fmt(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def write_metrics_csv(metrics: Iterable[IterationMetrics], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        f.write(METRICS_COMMENT + "\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(METRICS_HEADER)
        for m in metrics:
            writer.writerow(
                [m.iteration, _fmt(m.mean_loss_vs_expert), _fmt(m.loss_std), m.cumulative_queries]
            )
    return path


def read_metrics_csv(path: Path) -> list[IterationMetrics]:
    """Parse a metric CSV; iterations must run 1..M in order."""
    with path.open("r", newline="", encoding="utf-8") as f:
        lines = [line for line in f if not line.startswith("#")]
    reader = csv.DictReader(lines)
    if tuple(reader.fieldnames or ()) != METRICS_HEADER:
        raise ValueError(f"{path}: expected header {','.join(METRICS_HEADER)}, got {reader.fieldnames}")
    metrics = [
        IterationMetrics(
            iteration=int(row["iteration"]),
            mean_loss_vs_expert=float(row["loss"]),
            loss_std=float(row["err"]),
            cumulative_queries=int(row["total_obs"]),
        )
        for row in reader
    ]
    iterations = [m.iteration for m in metrics]
    if iterations != list(range(1, len(metrics) + 1)):
        raise ValueError(f"{path}: iterations must be 1..{len(metrics)}, got {iterations}")
    return metrics


def write_summary_csv(rows: Iterable[dict[str, Any]], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=SUMMARY_HEADER, lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(
                {
                    key: _fmt(value) if isinstance(value, float) else ("" if value is None else value)
                    for key, value in row.items()
                }
            )
    return path


def git_blob_hash(path: Path) -> str:
    """sha1 over ``b"blob <size>\\0" + content``, as ``git hash-object`` computes it."""
    content = path.read_bytes()
    digest = hashlib.sha1(usedforsecurity=False)
    digest.update(f"blob {len(content)}\0".encode())
    digest.update(content)
    return digest.hexdigest()


class RunManifest(BaseModel):
    """Everything needed to re-run and verify one experiment."""

    model_config = ConfigDict(extra="forbid")

    config: ExperimentConfig
    started_at: str
    finished_at: str | None = None
    status: str = "ok"
    error: str | None = None
    calibrated: list[str] = Field(default_factory=list)
    outputs: dict[str, str] = Field(default_factory=dict)
    csv_hashes: dict[str, str] = Field(default_factory=dict)
    profile: dict[str, Any] | None = None

    def record_output(self, name: str, path: Path) -> None:
        self.outputs[name] = str(path)
        if path.suffix == ".csv":
            self.csv_hashes[name] = git_blob_hash(path)

    def write(self, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")
        return path

    @classmethod
    def read(cls, path: Path) -> RunManifest:
        return cls.model_validate_json(path.read_text(encoding="utf-8"))


def utc_now() -> str:
    return datetime.now(UTC).isoformat(timespec="seconds")


__all__ = [
    "METRICS_COMMENT",
    "METRICS_HEADER",
    "SUMMARY_HEADER",
    "RunManifest",
    "git_blob_hash",
    "read_metrics_csv",
    "utc_now",
    "write_metrics_csv",
    "write_summary_csv",
]
