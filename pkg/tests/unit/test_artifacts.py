from __future__ import annotations

from collections.abc import Callable
from pathlib import Path

import pytest

from src.experiment.artifacts import (
    METRICS_COMMENT,
    RunManifest,
    git_blob_hash,
    read_metrics_csv,
    utc_now,
    write_metrics_csv,
    write_summary_csv,
)
from src.experiment.config import ExperimentConfig
from src.experiment.metrics import IterationMetrics

HELLO_BLOB_SHA1 = "ce013625030ba8dba906f756967f9e9ca394464a"

METRICS = [
    IterationMetrics(1, 0.53, 0.21, 750),
    IterationMetrics(2, 0.1 + 0.2, 0.05, 1500),
]


def test_metrics_csv_layout(tmp_path: Path) -> None:
    path = write_metrics_csv(METRICS, tmp_path / "run.csv")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == METRICS_COMMENT
    assert lines[1] == "iteration,loss,err,total_obs"
    assert lines[2] == "1,0.53,0.21,750"
    assert lines[3] == "2,0.30000000000000004,0.05,1500"


def test_metrics_csv_reads_back_exactly(tmp_path: Path) -> None:
    path = write_metrics_csv(METRICS, tmp_path / "run.csv")
    assert read_metrics_csv(path) == METRICS


def test_same_metrics_same_bytes(tmp_path: Path) -> None:
    first = write_metrics_csv(METRICS, tmp_path / "a.csv")
    second = write_metrics_csv(METRICS, tmp_path / "b.csv")
    assert first.read_bytes() == second.read_bytes()
    assert git_blob_hash(first) == git_blob_hash(second)


def test_out_of_order_iterations_are_rejected(tmp_path: Path) -> None:
    path = tmp_path / "bad.csv"
    path.write_text("iteration,loss,err,total_obs\n2,0.1,0.1,10\n1,0.1,0.1,20\n", encoding="utf-8")
    with pytest.raises(ValueError, match="iterations"):
        read_metrics_csv(path)


def test_wrong_header_is_rejected(tmp_path: Path) -> None:
    path = tmp_path / "bad.csv"
    path.write_text("iter,loss\n1,0.1\n", encoding="utf-8")
    with pytest.raises(ValueError, match="header"):
        read_metrics_csv(path)


def test_git_blob_hash_matches_git(tmp_path: Path) -> None:
    path = tmp_path / "hello.txt"
    path.write_bytes(b"hello\n")
    assert git_blob_hash(path) == HELLO_BLOB_SHA1


def test_summary_csv_blanks_missing_values(tmp_path: Path) -> None:
    rows = [
        {"run": "r", "env": "reach2d", "algorithm": "supervised", "seed": 0, "queries": 0,
         "loss": 0.5, "loss_std": 0.1, "efficiency": None, "status": "ok", "error": None},
    ]
    lines = write_summary_csv(rows, tmp_path / "summary.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("run,env,algorithm")
    assert lines[1] == "r,reach2d,supervised,0,0,0.5,0.1,,ok,"


def test_manifest_round_trip(tmp_path: Path, make_config: Callable[..., ExperimentConfig]) -> None:
    cfg = make_config(strategy="loss-gradient", tau=0.05, epsilon=0.01)
    csv_path = write_metrics_csv(METRICS, tmp_path / "run.csv")
    manifest = RunManifest(config=cfg, started_at=utc_now())
    manifest.record_output("metrics", csv_path)
    manifest.record_output("log", tmp_path / "run.log")

    restored = RunManifest.read(manifest.write(tmp_path / "manifest.json"))
    assert restored.config == cfg
    assert restored.csv_hashes == {"metrics": git_blob_hash(csv_path)}
    assert set(restored.outputs) == {"metrics", "log"}
