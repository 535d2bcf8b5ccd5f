"""
The aggregated dataset. Retraining and model selection live in
``src.aggregation.training`` (imported explicitly, it depends on the heads).
"""

from src.aggregation.dataset import (
    DEFAULT_VAL_FRACTION,
    Dataset,
    DatasetView,
    DemoRecord,
    RecordSource,
    aggregate,
    export_dataset,
    load_dataset,
    split,
    validation_size,
)

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
