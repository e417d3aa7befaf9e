"""Stage 1: rule-based per-column profiles. No model calls here."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from vizsmith.errors import EmptyDataset
from vizsmith.summarize.table import Column, Table, parse_iso_date

DEFAULT_SAMPLE_N = 5


@dataclass(frozen=True)
class FieldStats:
    min: object
    max: object
    n_unique: int
    n_null: int
    n_rows: int


@dataclass
class FieldProfile:
    name: str
    atomic_type: str
    stats: FieldStats
    samples: list = field(default_factory=list)
    semantic_type: str | None = None
    description: str | None = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "atomic_type": self.atomic_type,
            "stats": {
                "min": self.stats.min,
                "max": self.stats.max,
                "n_unique": self.stats.n_unique,
                "n_null": self.stats.n_null,
                "n_rows": self.stats.n_rows,
            },
            "samples": list(self.samples),
            "semantic_type": self.semantic_type,
            "description": self.description,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FieldProfile":
        stats = data["stats"]
        return cls(
            name=data["name"],
            atomic_type=data["atomic_type"],
            stats=FieldStats(
                min=stats["min"],
                max=stats["max"],
                n_unique=stats["n_unique"],
                n_null=stats["n_null"],
                n_rows=stats["n_rows"],
            ),
            samples=list(data.get("samples", [])),
            semantic_type=data.get("semantic_type"),
            description=data.get("description"),
        )


def _min_max(column: Column):
    non_null = [v for v in column.values if v is not None]
    if not non_null:
        return None, None
    if column.atomic_type in ("integer", "float"):
        return min(non_null), max(non_null)
    if column.atomic_type == "date":
        parseable = [v for v in non_null if parse_iso_date(v) is not None]
        if not parseable:
            return None, None
        return (
            min(parseable, key=lambda v: parse_iso_date(v)),
            max(parseable, key=lambda v: parse_iso_date(v)),
        )
    return None, None


def profile_column(column: Column, sample_n: int = DEFAULT_SAMPLE_N, rng_seed: int = 0) -> FieldProfile:
    """Stats plus a seeded random draw of distinct non-null sample values.

    Sampling is without replacement over distinct values in first-appearance
    order, so duplicated rows change neither the candidates nor the draw.
    """
    non_null = [v for v in column.values if v is not None]
    distinct = list(dict.fromkeys(non_null))
    lo, hi = _min_max(column)
    # string seed keeps the draw stable across platforms and per column
    rng = random.Random(f"{rng_seed}:{column.name}")
    samples = rng.sample(distinct, min(sample_n, len(distinct)))
    return FieldProfile(
        name=column.name,
        atomic_type=column.atomic_type,
        stats=FieldStats(
            min=lo,
            max=hi,
            n_unique=len(distinct),
            n_null=len(column.values) - len(non_null),
            n_rows=len(column.values),
        ),
        samples=samples,
    )


def build_base_summary(table: Table, sample_n: int = DEFAULT_SAMPLE_N, rng_seed: int = 0):
    """Profile every column; fully determined by (table, sample_n, rng_seed)."""
    from vizsmith.summarize.summary import DatasetSummary

    if table.n_rows == 0:
        raise EmptyDataset(f"table {table.name!r} has no rows")
    return DatasetSummary(
        name=table.name,
        source_path=table.source_path,
        description=None,
        fields=[profile_column(col, sample_n, rng_seed) for col in table.columns],
        row_count=table.n_rows,
        enrichment_status="base",
    )
