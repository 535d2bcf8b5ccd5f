"""
Suite runner: executes experiment configs, profiles them and persists artifacts.

Usage (example from CLI):
    from src.orchestrator import SuiteConfig, run_suite

    suite = run_suite(SuiteConfig(configs=[cfg_dagger, cfg_random], results_dir=Path("results")))
    print(suite.rows)

Each run writes into its own directory ``<results_dir>/<env>-<strategy>-seed<seed>/``:
- ``metrics.csv`` (iteration, loss, err, total_obs)
- ``dataset.csv`` (the aggregated demonstrations)
- ``run.log`` (JSON lines)
- ``manifest.json`` (config echo, timestamps, CSV hashes, profile)

and the suite writes ``<results_dir>/summary.csv`` with one row per run.
"""

from __future__ import annotations

import multiprocessing as mp
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from functools import partial
from pathlib import Path
from typing import Any, Literal

from src.aggregation.dataset import export_dataset
from src.calibration import with_calibrated_thresholds
from src.experiment.artifacts import (
    RunManifest,
    utc_now,
    write_metrics_csv,
    write_summary_csv,
)
from src.experiment.config import ExperimentConfig
from src.experiment.loop import run_experiment
from src.experiment.metrics import IterationMetrics, query_efficiency
from src.strategies import StrategyKind
from src.utils.logging import configure_logging, get_logger, run_log
from src.utils.profiler import ProfileStats, profile_block

log = get_logger(__name__)

FailurePolicy = Literal["tolerant", "strict"]
RunStatus = Literal["ok", "failed"]

SUITE_TIMEOUT_SECONDS = 24 * 3600


@dataclass
class SuiteConfig:
    """Configuration for running a suite of experiments."""

    configs: Sequence[ExperimentConfig]
    results_dir: Path = Path("results")
    workers: int = 1
    failure_policy: FailurePolicy = "tolerant"
    log_level: str = "INFO"
    json_logs: bool = False
    timeout_seconds: float = SUITE_TIMEOUT_SECONDS


@dataclass
class RunOutcome:
    config: ExperimentConfig
    run_dir: Path
    status: RunStatus
    metrics: list[IterationMetrics] = field(default_factory=list)
    calibrated: list[str] = field(default_factory=list)
    error: str | None = None
    error_type: str | None = None
    duration_seconds: float = 0.0

    @property
    def final(self) -> IterationMetrics | None:
        return self.metrics[-1] if self.metrics else None


@dataclass
class SuiteResult:
    outcomes: list[RunOutcome]
    rows: list[dict[str, Any]]
    summary_path: Path

    @property
    def failures(self) -> list[RunOutcome]:
        return [o for o in self.outcomes if o.status == "failed"]


def run_dir_for(cfg: ExperimentConfig, results_dir: Path) -> Path:
    return results_dir / cfg.run_name


def execute_run(
    cfg: ExperimentConfig,
    results_dir: Path,
    failure_policy: FailurePolicy = "tolerant",
) -> RunOutcome:
    """Calibrate if needed, run, and persist one experiment. Never raises in tolerant mode."""
    run_dir = run_dir_for(cfg, results_dir)
    manifest = RunManifest(config=cfg, started_at=utc_now())
    outcome = RunOutcome(config=cfg, run_dir=run_dir, status="ok")
    log.info("[RUN START] %s", cfg.run_name, extra={"run": cfg.run_name})

    stats: ProfileStats | None = None
    try:
        with run_log(run_dir / "run.log"), profile_block(cfg.run_name) as stats:
            try:
                cfg, calibrated = with_calibrated_thresholds(cfg)
                manifest.config = cfg
                manifest.calibrated = calibrated
                outcome.config, outcome.calibrated = cfg, calibrated
                result = run_experiment(cfg)
                outcome.metrics = result.metrics
                manifest.record_output("metrics", write_metrics_csv(result.metrics, run_dir / "metrics.csv"))
                manifest.record_output("dataset", export_dataset(result.dataset, run_dir / "dataset.csv"))
                log.info(
                    "[RUN SUCCESS] %s",
                    cfg.run_name,
                    extra={"run": cfg.run_name, "queries": result.final.cumulative_queries},
                )
            except Exception as exc:
                log.exception("[RUN FAILED] %s", cfg.run_name, extra={"run": cfg.run_name})
                manifest.status = outcome.status = "failed"
                manifest.error = outcome.error = str(exc)
                outcome.error_type = exc.__class__.__name__
                if failure_policy == "strict":
                    raise
    finally:
        manifest.finished_at = utc_now()
        manifest.record_output("log", run_dir / "run.log")
        if stats is not None:
            manifest.profile = stats.as_dict()
            outcome.duration_seconds = stats.duration_seconds
        manifest.write(run_dir / "manifest.json")
    return outcome


def _worker(
    cfg: ExperimentConfig,
    results_dir: Path,
    failure_policy: FailurePolicy,
    log_level: str,
    json_logs: bool,
) -> RunOutcome:
    configure_logging(level=log_level, json_logs=json_logs)
    return execute_run(cfg, results_dir, failure_policy)


def _with_efficiency(outcomes: list[RunOutcome]) -> list[RunOutcome]:
    """Fill per-iteration efficiency against the supervised run sharing env and seed."""
    supervised = {
        (o.config.env, o.config.seed): o
        for o in outcomes
        if o.config.strategy is StrategyKind.SUPERVISED and o.status == "ok"
    }
    filled = []
    for outcome in outcomes:
        baseline = supervised.get((outcome.config.env, outcome.config.seed))
        if baseline is None or outcome.status != "ok":
            filled.append(outcome)
            continue
        metrics = [
            replace(
                m,
                efficiency=query_efficiency(
                    m.mean_loss_vs_expert, b.mean_loss_vs_expert, m.cumulative_queries
                ),
            )
            for m, b in zip(outcome.metrics, baseline.metrics, strict=False)
        ]
        filled.append(replace(outcome, metrics=metrics + outcome.metrics[len(metrics) :]))
    return filled


def summary_row(outcome: RunOutcome) -> dict[str, Any]:
    cfg = outcome.config
    final = outcome.final
    return {
        "run": cfg.run_name,
        "env": cfg.env,
        "algorithm": cfg.strategy.value,
        "seed": cfg.seed,
        "queries": final.cumulative_queries if final else None,
        "loss": final.mean_loss_vs_expert if final else None,
        "loss_std": final.loss_std if final else None,
        "efficiency": final.efficiency if final else None,
        "status": outcome.status,
        "error": outcome.error,
    }


def run_suite(config: SuiteConfig) -> SuiteResult:
    """
    Run every config and write the combined summary.

    In tolerant mode a failing run becomes a failure row and the rest proceed;
    in strict mode the first failure is re-raised. With ``workers > 1`` runs are
    distributed over a spawn-context process pool.
    """
    if not config.configs:
        raise ValueError("run_suite needs at least one config")
    results_dir = Path(config.results_dir)
    names = [cfg.run_name for cfg in config.configs]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate runs in suite: {sorted(n for n in names if names.count(n) > 1)}")

    log.info("=" * 60)
    log.info("[SUITE START] %s run(s)", len(names), extra={"runs": names, "workers": config.workers})
    log.info("=" * 60)

    if config.workers > 1:
        worker = partial(
            _worker,
            results_dir=results_dir,
            failure_policy=config.failure_policy,
            log_level=config.log_level,
            json_logs=config.json_logs,
        )
        ctx = mp.get_context("spawn")
        with ctx.Pool(processes=min(config.workers, len(names))) as pool:
            outcomes = pool.map_async(worker, list(config.configs)).get(timeout=config.timeout_seconds)
    else:
        outcomes = [execute_run(cfg, results_dir, config.failure_policy) for cfg in config.configs]

    outcomes = _with_efficiency(outcomes)
    rows = [summary_row(o) for o in outcomes]
    summary_path = write_summary_csv(rows, results_dir / "summary.csv")

    failed = sum(1 for o in outcomes if o.status == "failed")
    log.info(
        "[SUITE COMPLETE] %s ok, %s failed",
        len(outcomes) - failed,
        failed,
        extra={"summary": str(summary_path), "failed": failed},
    )
    return SuiteResult(outcomes=outcomes, rows=rows, summary_path=summary_path)


__all__ = [
    "FailurePolicy",
    "RunOutcome",
    "SuiteConfig",
    "SuiteResult",
    "execute_run",
    "run_dir_for",
    "run_suite",
    "summary_row",
]
