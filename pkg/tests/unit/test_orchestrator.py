from __future__ import annotations

import json
import logging
from collections.abc import Callable
from pathlib import Path
from types import SimpleNamespace
from typing import Any

import pytest

from src import orchestrator
from src.aggregation.dataset import Dataset
from src.experiment.artifacts import RunManifest, read_metrics_csv
from src.experiment.config import ExperimentConfig
from src.experiment.metrics import IterationMetrics
from src.orchestrator import SuiteConfig, execute_run, run_suite

SUPERVISED_LOSS = 0.77
DAGGER_LOSS = 0.41
QUERIES = 3750
EXPECTED_DAGGER_EFFICIENCY = 0.96
EXPECTED_WORKERS = 2


def _fake_result(cfg: ExperimentConfig) -> SimpleNamespace:
    loss = SUPERVISED_LOSS if cfg.strategy == "supervised" else DAGGER_LOSS
    metrics = [IterationMetrics(1, loss, 0.1, QUERIES)]
    return SimpleNamespace(metrics=metrics, final=metrics[-1], dataset=Dataset(obs_dim=8, action_dim=2))


def _failing(cfg: ExperimentConfig) -> Any:
    raise RuntimeError("intentional failure")


class _FakeAsyncResult:
    def __init__(self, results: list[Any]) -> None:
        self._results = results
        self.timeout: float | None = None

    def get(self, timeout: float) -> list[Any]:
        self.timeout = timeout
        return self._results


class _FakePool:
    def __init__(self) -> None:
        self.map_async_calls = 0

    def map_async(self, worker: Callable[[Any], Any], work_items: list[Any]) -> _FakeAsyncResult:
        self.map_async_calls += 1
        return _FakeAsyncResult([worker(item) for item in work_items])

    def __enter__(self) -> _FakePool:
        return self

    def __exit__(self, exc_type, exc, tb) -> bool:
        del exc_type, exc, tb
        return False


class _FakeContext:
    def __init__(self) -> None:
        self.pool_processes: list[int | None] = []
        self.pools: list[_FakePool] = []

    def Pool(self, processes: int | None = None) -> _FakePool:  # noqa: N802
        self.pool_processes.append(processes)
        pool = _FakePool()
        self.pools.append(pool)
        return pool


class TestExecuteRun:
    def test_writes_every_artifact(
        self, monkeypatch: pytest.MonkeyPatch, make_config: Callable[..., ExperimentConfig], tmp_path: Path
    ) -> None:
        monkeypatch.setattr(orchestrator, "run_experiment", _fake_result)
        outcome = execute_run(make_config(), tmp_path)

        assert outcome.status == "ok"
        assert outcome.run_dir == tmp_path / "reach2d-dagger-seed1"
        assert read_metrics_csv(outcome.run_dir / "metrics.csv") == outcome.metrics
        manifest = RunManifest.read(outcome.run_dir / "manifest.json")
        assert manifest.status == "ok"
        assert set(manifest.csv_hashes) == {"metrics", "dataset"}
        assert manifest.finished_at is not None
        assert manifest.profile is not None

    def test_tolerant_failure_is_recorded(
        self, monkeypatch: pytest.MonkeyPatch, make_config: Callable[..., ExperimentConfig], tmp_path: Path
    ) -> None:
        monkeypatch.setattr(orchestrator, "run_experiment", _failing)
        outcome = execute_run(make_config(), tmp_path)

        assert outcome.status == "failed"
        assert outcome.error == "intentional failure"
        assert outcome.error_type == "RuntimeError"
        manifest = RunManifest.read(outcome.run_dir / "manifest.json")
        assert (manifest.status, manifest.error) == ("failed", "intentional failure")

    def test_strict_failure_reraises_after_writing_manifest(
        self, monkeypatch: pytest.MonkeyPatch, make_config: Callable[..., ExperimentConfig], tmp_path: Path
    ) -> None:
        monkeypatch.setattr(orchestrator, "run_experiment", _failing)
        cfg = make_config()
        with pytest.raises(RuntimeError, match="intentional"):
            execute_run(cfg, tmp_path, failure_policy="strict")
        assert RunManifest.read(tmp_path / cfg.run_name / "manifest.json").status == "failed"

    def test_missing_thresholds_are_calibrated_first(
        self, monkeypatch: pytest.MonkeyPatch, make_config: Callable[..., ExperimentConfig], tmp_path: Path
    ) -> None:
        seen: list[ExperimentConfig] = []

        def fake_run(cfg: ExperimentConfig) -> SimpleNamespace:
            seen.append(cfg)
            return _fake_result(cfg)

        monkeypatch.setattr(
            orchestrator,
            "with_calibrated_thresholds",
            lambda cfg: (cfg.model_copy(update={"tau": 0.25}), ["tau"]),
        )
        monkeypatch.setattr(orchestrator, "run_experiment", fake_run)
        outcome = execute_run(make_config(strategy="loss"), tmp_path)

        assert outcome.calibrated == ["tau"]
        assert seen[0].tau == 0.25
        manifest = RunManifest.read(outcome.run_dir / "manifest.json")
        assert manifest.calibrated == ["tau"]
        assert manifest.config.tau == 0.25


class TestRunSuite:
    def test_efficiency_is_measured_against_supervised(
        self, monkeypatch: pytest.MonkeyPatch, make_config: Callable[..., ExperimentConfig], tmp_path: Path
    ) -> None:
        monkeypatch.setattr(orchestrator, "run_experiment", _fake_result)
        configs = [make_config(strategy="supervised"), make_config(strategy="dagger")]
        result = run_suite(SuiteConfig(configs=configs, results_dir=tmp_path))

        rows = {row["algorithm"]: row for row in result.rows}
        assert rows["supervised"]["efficiency"] == pytest.approx(0.0)
        assert rows["dagger"]["efficiency"] == pytest.approx(EXPECTED_DAGGER_EFFICIENCY)
        assert result.summary_path == tmp_path / "summary.csv"
        assert result.summary_path.read_text(encoding="utf-8").startswith("run,env,algorithm")

    def test_failures_become_rows(
        self, monkeypatch: pytest.MonkeyPatch, make_config: Callable[..., ExperimentConfig], tmp_path: Path
    ) -> None:
        def sometimes(cfg: ExperimentConfig) -> SimpleNamespace:
            if cfg.strategy == "random":
                raise RuntimeError("intentional failure")
            return _fake_result(cfg)

        monkeypatch.setattr(orchestrator, "run_experiment", sometimes)
        configs = [make_config(strategy="supervised"), make_config(strategy="random")]
        result = run_suite(SuiteConfig(configs=configs, results_dir=tmp_path))

        assert [o.config.strategy.value for o in result.failures] == ["random"]
        failed = next(row for row in result.rows if row["algorithm"] == "random")
        assert failed["status"] == "failed"
        assert failed["queries"] is None

    def test_duplicate_runs_are_rejected(self, make_config: Callable[..., ExperimentConfig], tmp_path: Path) -> None:
        with pytest.raises(ValueError, match="duplicate"):
            run_suite(SuiteConfig(configs=[make_config(), make_config()], results_dir=tmp_path))

    def test_empty_suite_is_rejected(self, tmp_path: Path) -> None:
        with pytest.raises(ValueError):
            run_suite(SuiteConfig(configs=[], results_dir=tmp_path))

    def test_workers_use_a_local_spawn_context(
        self, monkeypatch: pytest.MonkeyPatch, make_config: Callable[..., ExperimentConfig], tmp_path: Path
    ) -> None:
        contexts: list[_FakeContext] = []

        def fake_get_context(method: str) -> _FakeContext:
            assert method == "spawn"
            context = _FakeContext()
            contexts.append(context)
            return context

        def fail_if_called(method: str, force: bool = False) -> None:
            del method, force
            raise AssertionError("set_start_method must not be called by the suite runner")

        monkeypatch.setattr("src.orchestrator.mp.get_context", fake_get_context)
        monkeypatch.setattr("src.orchestrator.mp.set_start_method", fail_if_called)
        monkeypatch.setattr(orchestrator, "run_experiment", _fake_result)

        configs = [make_config(seed=s) for s in range(3)]
        result = run_suite(SuiteConfig(configs=configs, results_dir=tmp_path, workers=EXPECTED_WORKERS))

        assert len(result.outcomes) == len(configs)
        assert contexts[0].pool_processes == [EXPECTED_WORKERS]
        assert contexts[0].pools[0].map_async_calls == 1


def test_same_config_writes_identical_csvs(make_config: Callable[..., ExperimentConfig], tmp_path: Path) -> None:
    cfg = make_config(strategy="random", horizon=10, episodes_per_iteration=2, iterations=2)
    first = execute_run(cfg, tmp_path / "a")
    second = execute_run(cfg, tmp_path / "b")
    assert first.status == second.status == "ok"

    hashes = [RunManifest.read(o.run_dir / "manifest.json").csv_hashes for o in (first, second)]
    assert hashes[0] == hashes[1]
    assert set(hashes[0]) == {"metrics", "dataset"}


def test_run_log_is_written_without_logging_configuration(
    monkeypatch: pytest.MonkeyPatch, make_config: Callable[..., ExperimentConfig], tmp_path: Path
) -> None:
    monkeypatch.setattr(logging.getLogger(), "level", logging.WARNING)
    outcome = execute_run(make_config(strategy="dagger", horizon=5), tmp_path, failure_policy="strict")

    messages = [
        json.loads(line)["message"]
        for line in (outcome.run_dir / "run.log").read_text(encoding="utf-8").splitlines()
    ]
    assert "[EXPERIMENT START]" in messages
    assert "[RUN SUCCESS] reach2d-dagger-seed1" in messages
    assert logging.getLogger().level == logging.WARNING
