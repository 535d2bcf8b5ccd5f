from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
import pytest

from src.aggregation import (
    Dataset,
    DemoRecord,
    RecordSource,
    aggregate,
    export_dataset,
    load_dataset,
    split,
    validation_size,
)
from src.aggregation.training import bootstrap
from src.environments import make_env
from src.exceptions import ShapeError

OBS_DIM = 3
ACTION_DIM = 2
BOOTSTRAP_HORIZON = 10
BOOTSTRAP_EPISODES = 5


def _record(rng: np.random.Generator, iteration: int = 1, source: RecordSource = RecordSource.QUERIED) -> DemoRecord:
    return DemoRecord(
        state=rng.normal(size=OBS_DIM),
        proposed_action=rng.normal(size=ACTION_DIM),
        expert_action=rng.normal(size=ACTION_DIM),
        iteration=iteration,
        source=source,
    )


def _filled(rng: np.random.Generator, size: int, split_seed: int = 0) -> Dataset:
    dataset = Dataset(OBS_DIM, ACTION_DIM, split_seed=split_seed)
    for _ in range(size):
        dataset.append(_record(rng))
    return dataset


class TestRecords:
    def test_arrays_are_read_only_copies(self, rng: np.random.Generator) -> None:
        state = rng.normal(size=OBS_DIM)
        record = DemoRecord(state, np.zeros(ACTION_DIM), np.ones(ACTION_DIM), 0, RecordSource.BOOTSTRAP)
        state[0] = 99.0
        assert record.state[0] != 99.0
        with pytest.raises(ValueError):
            record.state[0] = 1.0

    def test_non_finite_values_are_rejected(self) -> None:
        with pytest.raises(ValueError, match="non-finite"):
            DemoRecord(np.array([np.nan, 0.0, 0.0]), np.zeros(2), np.zeros(2), 0, RecordSource.BOOTSTRAP)

    def test_action_shapes_must_agree(self) -> None:
        with pytest.raises(ShapeError):
            DemoRecord(np.zeros(3), np.zeros(2), np.zeros(1), 0, RecordSource.QUERIED)

    def test_source_accepts_strings(self) -> None:
        record = DemoRecord(np.zeros(3), np.zeros(2), np.zeros(2), 0, "bootstrap")  # type: ignore[arg-type]
        assert record.source is RecordSource.BOOTSTRAP


class TestAggregate:
    def test_grows_by_one_and_keeps_duplicates(self, rng: np.random.Generator) -> None:
        dataset = _filled(rng, 3)
        before = dataset.records
        duplicate = before[0]
        aggregate(dataset, duplicate)
        assert len(dataset) == 4
        assert all(a is b for a, b in zip(dataset.records[:3], before, strict=True))
        assert dataset.records[3] is duplicate

    def test_dimension_mismatch(self, rng: np.random.Generator) -> None:
        dataset = Dataset(OBS_DIM + 1, ACTION_DIM)
        with pytest.raises(ShapeError):
            aggregate(dataset, _record(rng))

    def test_query_count_covers_bootstrap_and_queried(self, rng: np.random.Generator) -> None:
        dataset = _filled(rng, 4)
        dataset.append(_record(rng, iteration=0, source=RecordSource.BOOTSTRAP))
        assert dataset.query_count() == 5
        assert dataset.source_counts()[RecordSource.BOOTSTRAP] == 1


class TestSplit:
    @pytest.mark.parametrize(("size", "expected_val"), [(5, 1), (10, 2), (100, 20), (1001, 200)])
    def test_validation_size(self, rng: np.random.Generator, size: int, expected_val: int) -> None:
        assert validation_size(size) == expected_val
        train_view, val_view = split(_filled(rng, size))
        assert len(val_view) == expected_val
        assert len(train_view) == size - expected_val

    def test_views_partition_the_dataset(self, rng: np.random.Generator) -> None:
        train_view, val_view = split(_filled(rng, 37))
        combined = np.concatenate([train_view.indices, val_view.indices])
        np.testing.assert_array_equal(np.sort(combined), np.arange(37))

    def test_same_seed_same_split(self, rng: np.random.Generator) -> None:
        dataset = _filled(rng, 50, split_seed=4)
        np.testing.assert_array_equal(split(dataset)[1].indices, split(dataset)[1].indices)
        other = split(dataset, rng=np.random.default_rng(5))[1].indices
        assert not np.array_equal(split(dataset)[1].indices, other)

    def test_tiny_dataset_warns(self, rng: np.random.Generator, caplog: pytest.LogCaptureFixture) -> None:
        with caplog.at_level(logging.WARNING):
            train_view, val_view = split(_filled(rng, 2))
        assert len(val_view) == 0
        assert len(train_view) == 2
        assert "[SPLIT]" in caplog.text

    def test_empty_view_stacks_to_empty_matrix(self, rng: np.random.Generator) -> None:
        _, val_view = split(_filled(rng, 2))
        assert val_view.states.shape == (0, OBS_DIM)

    def test_fraction_out_of_range(self, rng: np.random.Generator) -> None:
        with pytest.raises(ValueError):
            split(_filled(rng, 4), val_fraction=1.0)


def test_export_and_load(rng: np.random.Generator, tmp_path: Path) -> None:
    dataset = _filled(rng, 6)
    dataset.append(_record(rng, iteration=0, source=RecordSource.BOOTSTRAP))
    path = export_dataset(dataset, tmp_path / "dataset.csv")
    header = path.read_text(encoding="utf-8").splitlines()[0]
    assert header.startswith("iteration,source,state_0")

    loaded = load_dataset(path)
    assert (loaded.obs_dim, loaded.action_dim) == (OBS_DIM, ACTION_DIM)
    assert len(loaded) == len(dataset)
    for original, restored in zip(dataset, loaded, strict=True):
        np.testing.assert_array_equal(original.state, restored.state)
        np.testing.assert_array_equal(original.expert_action, restored.expert_action)
        assert original.source == restored.source


class TestBootstrap:
    def test_records_every_expert_step(self) -> None:
        env = make_env("reach2d", horizon=BOOTSTRAP_HORIZON)
        dataset = bootstrap(env, BOOTSTRAP_EPISODES, np.random.default_rng(0))
        assert len(dataset) == BOOTSTRAP_EPISODES * BOOTSTRAP_HORIZON
        assert dataset.source_counts()[RecordSource.BOOTSTRAP] == len(dataset)
        for record in dataset:
            np.testing.assert_array_equal(record.proposed_action, record.expert_action)
            assert record.iteration == 0

    def test_is_deterministic(self) -> None:
        env = make_env("cliffcorridor", horizon=BOOTSTRAP_HORIZON)
        first = bootstrap(env, 2, np.random.default_rng(3))
        second = bootstrap(env, 2, np.random.default_rng(3))
        for a, b in zip(first, second, strict=True):
            np.testing.assert_array_equal(a.state, b.state)

    def test_needs_an_episode(self) -> None:
        with pytest.raises(ValueError):
            bootstrap(make_env("reach2d"), 0, np.random.default_rng(0))
