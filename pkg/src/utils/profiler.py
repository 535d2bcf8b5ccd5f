"""
Wall-clock and memory profiling for experiment runs.

    from src.utils.profiler import profile_block

    with profile_block("reach2d-dagger-seed1") as stats:
        run_experiment(cfg)

    print(stats.duration_seconds, stats.peak_rss_bytes)

Peak RSS comes from a background sampling thread (psutil) so bursty phases such
as retraining are captured, not only the start/end snapshots.
"""

from __future__ import annotations

import contextlib
import threading
import time
from collections.abc import Generator
from dataclasses import asdict, dataclass, field
from typing import Any

import psutil


@dataclass
class ProfileStats:
    label: str
    start_ts: float = field(default=0.0)
    end_ts: float = field(default=0.0)
    duration_seconds: float = field(default=0.0)
    peak_rss_bytes: int | None = field(default=None)
    cpu_percent: float | None = field(default=None)

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


def _cpu_seconds(process: psutil.Process) -> float:
    try:
        times = process.cpu_times()
        return float(times.user + times.system)
    except (psutil.NoSuchProcess, psutil.AccessDenied):
        return 0.0


@contextlib.contextmanager
def profile_block(label: str, sample_interval_ms: int = 50) -> Generator[ProfileStats, None, None]:
    """
    Profile a block of code.

    Parameters
    ----------
    label : str
        Human-friendly label for the profiled block.
    sample_interval_ms : int
        Interval in milliseconds for RSS sampling.
    """
    stats = ProfileStats(label=label)
    process = psutil.Process()
    peak_rss = process.memory_info().rss
    stop_sampling = threading.Event()

    def _sample_rss() -> None:
        nonlocal peak_rss
        while not stop_sampling.is_set():
            try:
                peak_rss = max(peak_rss, process.memory_info().rss)
            except (psutil.NoSuchProcess, psutil.AccessDenied):
                return
            stop_sampling.wait(timeout=sample_interval_ms / 1000.0)

    sampler = threading.Thread(target=_sample_rss, daemon=True)
    start_cpu = _cpu_seconds(process)
    sampler.start()

    stats.start_ts = time.perf_counter()
    try:
        yield stats
    finally:
        stats.end_ts = time.perf_counter()
        stats.duration_seconds = stats.end_ts - stats.start_ts
        stop_sampling.set()
        sampler.join(timeout=1.0)
        stats.peak_rss_bytes = peak_rss or None
        if stats.duration_seconds > 0:
            stats.cpu_percent = (_cpu_seconds(process) - start_cpu) / stats.duration_seconds * 100


__all__ = ["ProfileStats", "profile_block"]
