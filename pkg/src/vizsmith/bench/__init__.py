"""Benchmark harness: error-rate metrics, matrix runner, bundled corpus."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from vizsmith.bench.metrics import (
    CellStats,
    MetricsReport,
    RunOutcome,
    build_report,
    cell_key,
    error_rate,
    grid_key,
)
from vizsmith.bench.report import REPORT_FORMATS, emit_report
from vizsmith.bench.runner import BenchmarkConfig, run_benchmark


def corpus_dir() -> Path:
    """Directory holding the bundled benchmark datasets."""
    return Path(str(resources.files("vizsmith.bench").joinpath("corpus")))


def corpus_path(name: str) -> Path:
    path = corpus_dir() / name
    if not path.exists():
        raise FileNotFoundError(f"no bundled dataset named {name!r}")
    return path


def corpus_datasets() -> list[Path]:
    return sorted(corpus_dir().glob("*.csv"))
