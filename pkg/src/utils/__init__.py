"""
Utilities package for the RadGrad benchmark.

Exports shared helpers for logging, profiling and seeded random streams.
Keep this package lightweight and free of domain-specific logic.
"""

from src.utils.logging import configure_logging, get_logger, run_log
from src.utils.profiler import ProfileStats, profile_block
from src.utils.seeding import Stream, derive_seed, make_rng

__all__ = [
    "ProfileStats",
    "Stream",
    "configure_logging",
    "derive_seed",
    "get_logger",
    "make_rng",
    "profile_block",
    "run_log",
]
