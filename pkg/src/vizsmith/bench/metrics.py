"""Benchmark accounting: error-rate and quality aggregation over run outcomes.

The headline number is the visualization error rate: the percentage of
generated visualizations whose execution ended in an error status. Quality
(sevq) aggregates are attached when the benchmark ran self-evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from vizsmith.errors import DivisionByZeroTotal
from vizsmith.generate.executor import ERROR_STATUSES

TERMINAL_STATUSES = ("compiled_ok",) + ERROR_STATUSES


def error_rate(errors: int, total: int) -> float:
    """Percentage of runs that errored: errors/total x 100, exact division."""
    if total == 0:
        raise DivisionByZeroTotal("error rate undefined over zero runs")
    if errors < 0 or total < 0 or errors > total:
        raise ValueError(f"bad counts: errors={errors} total={total}")
    return errors / total * 100.0


@dataclass(frozen=True)
class RunOutcome:
    dataset: str
    grammar: str
    condition: str
    goal_index: int
    status: str
    sevq: float | None = None

    def __post_init__(self) -> None:
        if self.status not in TERMINAL_STATUSES:
            raise ValueError(f"non-terminal outcome status {self.status!r}")

    @property
    def is_error(self) -> bool:
        return self.status in ERROR_STATUSES

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "grammar": self.grammar,
            "condition": self.condition,
            "goal_index": self.goal_index,
            "status": self.status,
            "sevq": self.sevq,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunOutcome":
        return cls(
            dataset=data["dataset"],
            grammar=data["grammar"],
            condition=data["condition"],
            goal_index=data["goal_index"],
            status=data["status"],
            sevq=data.get("sevq"),
        )


@dataclass(frozen=True)
class CellStats:
    """Counts for one slice of the run grid; rate is None when nothing ran."""

    errors: int
    total: int
    error_rate: float | None
    mean_sevq: float | None

    def to_dict(self) -> dict:
        return {
            "errors": self.errors,
            "total": self.total,
            "error_rate": self.error_rate,
            "mean_sevq": self.mean_sevq,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CellStats":
        return cls(
            errors=data["errors"],
            total=data["total"],
            error_rate=data["error_rate"],
            mean_sevq=data["mean_sevq"],
        )


def _stats_for(outcomes: list[RunOutcome]) -> CellStats:
    total = len(outcomes)
    errors = sum(1 for o in outcomes if o.is_error)
    scored = [o.sevq for o in outcomes if o.sevq is not None]
    return CellStats(
        errors=errors,
        total=total,
        error_rate=error_rate(errors, total) if total else None,
        mean_sevq=sum(scored) / len(scored) if scored else None,
    )


@dataclass(frozen=True)
class MetricsReport:
    errors: int
    total: int
    error_rate: float
    mean_sevq: float | None
    cells: dict[str, CellStats]
    by_grammar_condition: dict[str, CellStats]
    warnings: tuple[str, ...] = field(default_factory=tuple)
    outcomes: tuple[RunOutcome, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "errors": self.errors,
            "total": self.total,
            "error_rate": self.error_rate,
            "mean_sevq": self.mean_sevq,
            "cells": {key: cell.to_dict() for key, cell in self.cells.items()},
            "by_grammar_condition": {
                key: cell.to_dict() for key, cell in self.by_grammar_condition.items()
            },
            "warnings": list(self.warnings),
            "outcomes": [o.to_dict() for o in self.outcomes],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MetricsReport":
        return cls(
            errors=data["errors"],
            total=data["total"],
            error_rate=data["error_rate"],
            mean_sevq=data["mean_sevq"],
            cells={k: CellStats.from_dict(v) for k, v in data["cells"].items()},
            by_grammar_condition={
                k: CellStats.from_dict(v)
                for k, v in data["by_grammar_condition"].items()
            },
            warnings=tuple(data.get("warnings", ())),
            outcomes=tuple(RunOutcome.from_dict(o) for o in data.get("outcomes", ())),
        )


def cell_key(dataset: str, grammar: str, condition: str) -> str:
    return f"{dataset}::{grammar}::{condition}"


def grid_key(grammar: str, condition: str) -> str:
    return f"{grammar}::{condition}"


def build_report(
    outcomes: list[RunOutcome],
    warnings: list[str],
    *,
    datasets: tuple[str, ...],
    grammars: tuple[str, ...],
    conditions: tuple[str, ...],
) -> MetricsReport:
    """Reduce the outcome list over the full configured grid.

    Every configured (dataset x grammar x condition) cell appears, including
    cells where goal generation failed and nothing ran.
    """
    by_cell: dict[str, list[RunOutcome]] = {
        cell_key(d, g, c): [] for d in datasets for g in grammars for c in conditions
    }
    by_grid: dict[str, list[RunOutcome]] = {
        grid_key(g, c): [] for g in grammars for c in conditions
    }
    for outcome in outcomes:
        by_cell[cell_key(outcome.dataset, outcome.grammar, outcome.condition)].append(outcome)
        by_grid[grid_key(outcome.grammar, outcome.condition)].append(outcome)
    overall = _stats_for(list(outcomes))
    if overall.error_rate is None:
        raise DivisionByZeroTotal("benchmark produced no outcomes at all")
    return MetricsReport(
        errors=overall.errors,
        total=overall.total,
        error_rate=overall.error_rate,
        mean_sevq=overall.mean_sevq,
        cells={key: _stats_for(group) for key, group in sorted(by_cell.items())},
        by_grammar_condition={key: _stats_for(group) for key, group in sorted(by_grid.items())},
        warnings=tuple(warnings),
        outcomes=tuple(outcomes),
    )
