"""
Named, disjoint random streams.

Every stochastic piece of an experiment draws from its own ``numpy`` Generator,
derived from the experiment seed plus a stream id and optional keys (iteration,
episode, ...). Adding draws to one stream never shifts another, which is what
keeps evaluations comparable when iterations are added.
"""

from __future__ import annotations

from enum import IntEnum

import numpy as np


class Stream(IntEnum):
    BOOTSTRAP = 0
    ROLLOUT = 1
    QUERY = 2
    COIN = 3
    EVAL = 4
    SPLIT = 5
    POLICY_INIT = 6
    LOSSNET_INIT = 7
    TRAIN = 8
    CALIBRATION = 9


def seed_sequence(seed: int, stream: Stream, *keys: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=seed, spawn_key=(int(stream), *keys))


def make_rng(seed: int, stream: Stream, *keys: int) -> np.random.Generator:
    """Generator for ``stream`` under ``seed``; ``keys`` select a sub-stream."""
    return np.random.default_rng(seed_sequence(seed, stream, *keys))


def derive_seed(seed: int, stream: Stream, *keys: int) -> int:
    """A 64-bit integer seed for APIs that take ints (e.g. ``TrainConfig.seed``)."""
    return int(seed_sequence(seed, stream, *keys).generate_state(1, dtype=np.uint64)[0])


__all__ = ["Stream", "derive_seed", "make_rng", "seed_sequence"]
