from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np

from src.utils.logging import ConsoleFormatter, _json_formatter, get_logger, run_log

EXPECTED_ITERATION = 3
EXPECTED_QUERIES = 412


def _record(msg: str = "hello") -> logging.LogRecord:
    return logging.LogRecord(
        name="test.logger",
        level=logging.INFO,
        pathname=__file__,
        lineno=1,
        msg=msg,
        args=(),
        exc_info=None,
    )


def test_json_formatter_promotes_standard_extra_fields() -> None:
    record = _record()
    record.iteration = EXPECTED_ITERATION
    record.strategy = "loss-gradient"

    payload = json.loads(_json_formatter(record))

    assert payload["level"] == "INFO"
    assert payload["logger"] == "test.logger"
    assert payload["message"] == "hello"
    assert payload["iteration"] == EXPECTED_ITERATION
    assert payload["strategy"] == "loss-gradient"


def test_json_formatter_serializes_numpy_values() -> None:
    record = _record()
    record.queries = np.int64(EXPECTED_QUERIES)
    record.loss = np.float64(0.25)
    record.action = np.array([0.5, -1.0])
    record.out_dir = Path("results")

    payload = json.loads(_json_formatter(record))

    assert payload["queries"] == EXPECTED_QUERIES
    assert payload["loss"] == 0.25
    assert payload["action"] == [0.5, -1.0]
    assert payload["out_dir"] == "results"


def test_run_log_mirrors_records_as_json_lines(tmp_path: Path) -> None:
    log = get_logger("test.run_log")
    root = logging.getLogger()
    previous = root.level
    root.setLevel(logging.WARNING)
    try:
        with run_log(tmp_path / "run.log") as path:
            log.info("[ITERATION] evaluated", extra={"iteration": EXPECTED_ITERATION})
        assert root.level == logging.WARNING
        log.info("after the block")
    finally:
        root.setLevel(previous)

    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 1
    payload = json.loads(lines[0])
    assert payload["message"] == "[ITERATION] evaluated"
    assert payload["iteration"] == EXPECTED_ITERATION


def test_console_formatter_appends_run_context() -> None:
    record = _record("[ITERATION] evaluated")
    record.run = "reach2d-dagger-seed1"
    record.iteration = EXPECTED_ITERATION
    record.new_queries = EXPECTED_QUERIES

    line = ConsoleFormatter().format(record)

    assert line.endswith(f"| run=reach2d-dagger-seed1 iteration={EXPECTED_ITERATION}")
    assert "new_queries" not in line


def test_console_formatter_leaves_plain_records_alone() -> None:
    line = ConsoleFormatter().format(_record())
    assert line.endswith("| INFO | test.logger | hello")
