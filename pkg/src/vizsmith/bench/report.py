"""Report rendering: lossless JSON plus human-facing markdown and CSV tables."""

from __future__ import annotations

import csv
import io
import json

from vizsmith.bench.metrics import CellStats, MetricsReport

REPORT_FORMATS = ("json", "markdown", "csv")


def _fmt(value: float | None, digits: int = 1) -> str:
    return "" if value is None else f"{value:.{digits}f}"


def emit_report(report: MetricsReport, fmt: str = "json") -> str:
    """Render a metrics report; json is lossless, the others are tables.

    No timestamps or environment details go in: the same report always
    renders to identical bytes.
    """
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if fmt == "markdown":
        return _markdown(report)
    if fmt == "csv":
        return _csv(report)
    raise ValueError(f"unknown report format {fmt!r}; choose one of {REPORT_FORMATS}")


def _rows(report: MetricsReport) -> list[tuple[str, str, CellStats]]:
    rows = []
    for key, cell in report.by_grammar_condition.items():
        grammar, condition = key.split("::", 1)
        rows.append((grammar, condition, cell))
    return rows


def _markdown(report: MetricsReport) -> str:
    lines = [
        f"Overall error rate: {report.error_rate:.1f}% "
        f"({report.errors}/{report.total} runs)",
    ]
    if report.mean_sevq is not None:
        lines.append(f"Mean self-evaluated quality: {report.mean_sevq:.2f}")
    lines += [
        "",
        "| grammar | condition | errors | total | error rate % | mean quality |",
        "| --- | --- | --- | --- | --- | --- |",
    ]
    for grammar, condition, cell in _rows(report):
        lines.append(
            f"| {grammar} | {condition} | {cell.errors} | {cell.total} "
            f"| {_fmt(cell.error_rate)} | {_fmt(cell.mean_sevq, 2)} |"
        )
    if report.warnings:
        lines += ["", "Warnings:"] + [f"- {w}" for w in report.warnings]
    return "\n".join(lines) + "\n"


def _csv(report: MetricsReport) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["grammar", "condition", "errors", "total", "error_rate_pct", "mean_sevq"])
    for grammar, condition, cell in _rows(report):
        writer.writerow(
            [
                grammar,
                condition,
                cell.errors,
                cell.total,
                "" if cell.error_rate is None else repr(cell.error_rate),
                "" if cell.mean_sevq is None else repr(cell.mean_sevq),
            ]
        )
    return out.getvalue()
