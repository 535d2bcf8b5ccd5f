"""
The experiment driver: configuration, the gated aggregation loop, metrics and artifacts.
"""

from src.experiment.artifacts import (
    RunManifest,
    git_blob_hash,
    read_metrics_csv,
    write_metrics_csv,
    write_summary_csv,
)
from src.experiment.config import ExperimentConfig
from src.experiment.loop import DecisionLogEntry, ExperimentResult, run_experiment
from src.experiment.metrics import (
    EFFICIENCY_SCALE,
    EvalStats,
    IterationMetrics,
    evaluate,
    loss_vs_expert,
    query_efficiency,
)
from src.experiment.shift import collect_states, visitation_shift

__all__ = [
    "EFFICIENCY_SCALE",
    "DecisionLogEntry",
    "EvalStats",
    "ExperimentConfig",
    "ExperimentResult",
    "IterationMetrics",
    "RunManifest",
    "collect_states",
    "evaluate",
    "git_blob_hash",
    "loss_vs_expert",
    "query_efficiency",
    "read_metrics_csv",
    "run_experiment",
    "visitation_shift",
    "write_metrics_csv",
    "write_summary_csv",
]
