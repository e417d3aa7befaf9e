"""In-memory table model and ingestion for csv and json record files.

Cell typing is deliberately portable rather than tied to any dataframe
library: each cell parses to integer, float, boolean, or string, empty csv
cells parse to null, and a column's atomic type is the widening union of its
cell types (integer -> float -> string). String columns whose non-null
values are at least 90% ISO-8601 parseable are promoted to date. Cells are
coerced to the unified type at ingest, so every later stage sees one type
per column.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from vizsmith.errors import EmptyDataset, HeaderMissing, ParseError

ATOMIC_TYPES = ("integer", "float", "boolean", "string", "date", "unknown")

_INT_RE = re.compile(r"^[+-]?\d+$")
_FLOAT_RE = re.compile(r"^[+-]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?$")

DATE_PROMOTION_THRESHOLD = 0.9


@dataclass
class Column:
    name: str
    atomic_type: str
    values: list


@dataclass
class Table:
    name: str
    source_path: str
    columns: list[Column]

    @property
    def n_rows(self) -> int:
        return len(self.columns[0].values) if self.columns else 0

    def column(self, name: str) -> Column:
        for col in self.columns:
            if col.name == name:
                return col
        raise KeyError(name)

    def rows(self) -> list[list]:
        return [[col.values[i] for col in self.columns] for i in range(self.n_rows)]


def _parse_csv_cell(text: str):
    if text == "":
        return None
    if _INT_RE.match(text):
        return int(text)
    if _FLOAT_RE.match(text):
        return float(text)
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    return text


def _cell_type(value) -> str | None:
    if value is None:
        return None
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, int):
        return "integer"
    if isinstance(value, float):
        return "float"
    return "string"


def parse_iso_date(text: str) -> datetime | None:
    """ISO-8601 date or datetime; anything else is None."""
    if not isinstance(text, str) or not text:
        return None
    try:
        return datetime.fromisoformat(text)
    except ValueError:
        return None


def unify_column_type(cell_types: set[str]) -> str:
    """Widening union of cell types for one column."""
    if not cell_types:
        return "unknown"
    if cell_types == {"boolean"}:
        return "boolean"
    if cell_types == {"integer"}:
        return "integer"
    if cell_types <= {"integer", "float"}:
        return "float"
    return "string"


def _coerce(value, target: str):
    if value is None:
        return None
    if target == "float":
        return float(value)
    if target in ("string", "date"):
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, str):
            return value
        return repr(value)
    return value


def _finalize_column(name: str, raw_values: list) -> Column:
    types = {t for t in (_cell_type(v) for v in raw_values) if t is not None}
    atomic = unify_column_type(types)
    values = [_coerce(v, atomic) for v in raw_values]
    if atomic == "string":
        non_null = [v for v in values if v is not None]
        parsed = sum(1 for v in non_null if parse_iso_date(v) is not None)
        if non_null and parsed / len(non_null) >= DATE_PROMOTION_THRESHOLD:
            atomic = "date"
    return Column(name=name, atomic_type=atomic, values=values)


def _ingest_csv(path: Path) -> list[Column]:
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDataset(f"{path} holds no rows")
        names = [h.strip() for h in header]
        if not names or any(not n for n in names) or len(set(names)) != len(names):
            raise HeaderMissing(f"{path} has a blank or duplicated header row")
        cells: list[list] = [[] for _ in names]
        for row_index, row in enumerate(reader):
            if not row:
                continue  # blank separator lines are not records
            if len(row) != len(names):
                raise ParseError(row_index, len(row), f"expected {len(names)} cells, found {len(row)}")
            for i, text in enumerate(row):
                cells[i].append(_parse_csv_cell(text))
    if not cells[0]:
        raise EmptyDataset(f"{path} has a header but no data rows")
    return [_finalize_column(name, values) for name, values in zip(names, cells)]


def _ingest_json_records(path: Path) -> list[Column]:
    try:
        records = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(0, None, f"invalid JSON: {exc}") from exc
    if not isinstance(records, list):
        raise ParseError(0, None, "expected a JSON array of flat objects")
    if not records:
        raise EmptyDataset(f"{path} holds no records")
    names: list[str] = []
    for i, record in enumerate(records):
        if not isinstance(record, dict):
            raise ParseError(i, None, "record is not an object")
        for key, value in record.items():
            if isinstance(value, (dict, list)):
                raise ParseError(i, key, "nested values are not supported")
            if key not in names:
                names.append(key)
    if not names:
        raise ParseError(0, None, "records carry no fields")
    cells = [[record.get(name) for record in records] for name in names]
    return [_finalize_column(name, values) for name, values in zip(names, cells)]


def ingest(path: str | Path, fmt: str | None = None) -> Table:
    """Load a csv or json_records file into a typed Table.

    fmt defaults from the file extension (.csv / .json). Raises ParseError,
    EmptyDataset, or HeaderMissing on malformed input.
    """
    path = Path(path)
    if fmt is None:
        fmt = "json_records" if path.suffix.lower() == ".json" else "csv"
    if fmt == "csv":
        columns = _ingest_csv(path)
    elif fmt == "json_records":
        columns = _ingest_json_records(path)
    else:
        raise ValueError(f"unknown dataset format {fmt!r}")
    return Table(name=path.stem, source_path=str(path), columns=columns)
