"""
RadGrad benchmark - query-gated imitation learning with risk-gradient gates.

The package aggregates expert demonstrations over DAgger-style iterations and
compares rules for deciding when to ask the expert:

- Supervised and DAgger baselines
- Random querying
- Loss-threshold gates (regression or classifier loss network)
- Loss-gradient gates and coin-flip hybrids with random querying

It also ships the two toy environments the rules are benchmarked on, threshold
calibration, and CSV/manifest artifacts for every run.
"""

from __future__ import annotations

__version__ = "0.1.0"
__license__ = "MIT"

# Public API exports
from src.calibration import CalibrationReport, calibrate_thresholds
from src.config import Settings, get_settings
from src.experiment import ExperimentConfig, ExperimentResult, IterationMetrics, run_experiment
from src.orchestrator import SuiteConfig, execute_run, run_suite
from src.strategies import QueryDecision, QueryStrategy, StrategyKind, available_strategies
from src.utils.logging import configure_logging, get_logger
from src.utils.profiler import ProfileStats, profile_block

__all__ = [
    "CalibrationReport",
    "ExperimentConfig",
    "ExperimentResult",
    "IterationMetrics",
    "ProfileStats",
    "QueryDecision",
    "QueryStrategy",
    "Settings",
    "StrategyKind",
    "SuiteConfig",
    "__license__",
    "__version__",
    "available_strategies",
    "calibrate_thresholds",
    "configure_logging",
    "execute_run",
    "get_logger",
    "get_settings",
    "profile_block",
    "run_experiment",
    "run_suite",
]
