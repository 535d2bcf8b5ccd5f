"""
The aggregated demonstration dataset and its train/validation split.

Records are ``(state, proposed_action, expert_action)`` triples tagged with the
iteration that produced them and whether they came from the expert bootstrap
or from a gated query. The dataset only ever grows; records and their arrays
are immutable once appended.

CSV format (``export_dataset`` / ``load_dataset``), one record per line after a
header::

    iteration,source,state_0..state_{m-1},proposed_0..proposed_{n-1},expert_0..expert_{n-1}
"""

from __future__ import annotations

import csv
from collections import Counter
from collections.abc import Iterator
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path

import numpy as np

from src.exceptions import ShapeError
from src.utils.logging import get_logger

log = get_logger(__name__)

DEFAULT_VAL_FRACTION = 0.2


class RecordSource(StrEnum):
    BOOTSTRAP = "bootstrap"
    QUERIED = "queried"


def _readonly(values: np.ndarray) -> np.ndarray:
    out = np.array(values, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class DemoRecord:
    state: np.ndarray
    proposed_action: np.ndarray
    expert_action: np.ndarray
    iteration: int
    source: RecordSource

    def __post_init__(self) -> None:
        for name in ("state", "proposed_action", "expert_action"):
            value = _readonly(getattr(self, name))
            if value.ndim != 1:
                raise ShapeError(f"{name} must be a vector, got shape {value.shape}")
            if not np.all(np.isfinite(value)):
                raise ValueError(f"{name} contains non-finite entries")
            object.__setattr__(self, name, value)
        if self.proposed_action.shape != self.expert_action.shape:
            raise ShapeError(
                f"proposed {self.proposed_action.shape} and expert {self.expert_action.shape} "
                "actions differ in shape"
            )
        if self.iteration < 0:
            raise ValueError(f"iteration must be non-negative, got {self.iteration}")
        object.__setattr__(self, "source", RecordSource(self.source))


@dataclass
class Dataset:
    """Append-only multiset of demonstration records (duplicates are kept)."""

    obs_dim: int
    action_dim: int
    split_seed: int = 0
    _records: list[DemoRecord] = field(default_factory=list, repr=False)

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[DemoRecord]:
        return iter(self._records)

    @property
    def records(self) -> tuple[DemoRecord, ...]:
        return tuple(self._records)

    def append(self, record: DemoRecord) -> None:
        if record.state.shape != (self.obs_dim,) or record.expert_action.shape != (self.action_dim,):
            raise ShapeError(
                f"record dims ({record.state.size}, {record.expert_action.size}) do not match "
                f"dataset ({self.obs_dim}, {self.action_dim})"
            )
        self._records.append(record)

    def source_counts(self) -> Counter[RecordSource]:
        return Counter(r.source for r in self._records)

    def query_count(self) -> int:
        """Expert queries spent on this dataset, each bootstrap or queried record costing one."""
        counts = self.source_counts()
        return counts[RecordSource.BOOTSTRAP] + counts[RecordSource.QUERIED]

    def view(self, indices: np.ndarray | None = None) -> DatasetView:
        if indices is None:
            indices = np.arange(len(self._records))
        return DatasetView(self, indices)


def aggregate(dataset: Dataset, record: DemoRecord) -> Dataset:
    """Append ``record``; earlier records are left untouched."""
    dataset.append(record)
    return dataset


@dataclass(frozen=True)
class DatasetView:
    """An immutable index selection over a dataset (one side of a split)."""

    dataset: Dataset
    indices: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "indices", _readonly_int(self.indices))

    def __len__(self) -> int:
        return int(self.indices.size)

    def _stack(self, attr: str, width: int) -> np.ndarray:
        records = self.dataset.records
        if not len(self):
            return np.zeros((0, width))
        return np.stack([getattr(records[i], attr) for i in self.indices])

    @property
    def states(self) -> np.ndarray:
        return self._stack("state", self.dataset.obs_dim)

    @property
    def proposed_actions(self) -> np.ndarray:
        return self._stack("proposed_action", self.dataset.action_dim)

    @property
    def expert_actions(self) -> np.ndarray:
        return self._stack("expert_action", self.dataset.action_dim)


def _readonly_int(values: np.ndarray) -> np.ndarray:
    out = np.array(values, dtype=np.int64, copy=True)
    out.setflags(write=False)
    return out


def validation_size(size: int, val_fraction: float = DEFAULT_VAL_FRACTION) -> int:
    return int(round(val_fraction * size))


def split(
    dataset: Dataset,
    val_fraction: float = DEFAULT_VAL_FRACTION,
    rng: np.random.Generator | None = None,
) -> tuple[DatasetView, DatasetView]:
    """
    Shuffle and partition the whole dataset into train and validation views.

    ``|val| = round(val_fraction * |D|)``. Without ``rng`` the shuffle is drawn
    from ``dataset.split_seed``.
    """
    if not 0.0 <= val_fraction < 1.0:
        raise ValueError(f"val_fraction must lie in [0, 1), got {val_fraction}")
    size = len(dataset)
    generator = rng if rng is not None else np.random.default_rng(dataset.split_seed)
    order = generator.permutation(size)
    n_val = validation_size(size, val_fraction)
    if n_val == 0:
        log.warning(
            "[SPLIT] dataset too small for a validation set",
            extra={"records": size, "val_fraction": val_fraction},
        )
    return dataset.view(np.sort(order[n_val:])), dataset.view(np.sort(order[:n_val]))


def export_dataset(dataset: Dataset, path: Path) -> Path:
    m, n = dataset.obs_dim, dataset.action_dim
    header = (
        ["iteration", "source"]
        + [f"state_{i}" for i in range(m)]
        + [f"proposed_{i}" for i in range(n)]
        + [f"expert_{i}" for i in range(n)]
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for record in dataset:
            values = np.concatenate([record.state, record.proposed_action, record.expert_action])
            writer.writerow([record.iteration, record.source.value, *(repr(float(v)) for v in values)])
    return path


def load_dataset(path: Path, split_seed: int = 0) -> Dataset:
    with path.open("r", newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader)
        m = sum(1 for name in header if name.startswith("state_"))
        n = sum(1 for name in header if name.startswith("expert_"))
        dataset = Dataset(obs_dim=m, action_dim=n, split_seed=split_seed)
        for row in reader:
            values = np.array([float(v) for v in row[2:]])
            dataset.append(
                DemoRecord(
                    state=values[:m],
                    proposed_action=values[m : m + n],
                    expert_action=values[m + n :],
                    iteration=int(row[0]),
                    source=RecordSource(row[1]),
                )
            )
    return dataset


__all__ = [
    "DEFAULT_VAL_FRACTION",
    "Dataset",
    "DatasetView",
    "DemoRecord",
    "RecordSource",
    "aggregate",
    "export_dataset",
    "load_dataset",
    "split",
    "validation_size",
]
