"""Two-stage dataset summarization: rule-based profile, optional enrichment."""

from vizsmith.summarize.profile import FieldProfile, FieldStats, build_base_summary, profile_column
from vizsmith.summarize.summary import (
    CONDITIONS,
    DatasetSummary,
    apply_user_refinement,
    enrich_summary,
    render_summary,
)
from vizsmith.summarize.table import Column, Table, ingest

__all__ = [
    "CONDITIONS",
    "Column",
    "DatasetSummary",
    "FieldProfile",
    "FieldStats",
    "Table",
    "apply_user_refinement",
    "build_base_summary",
    "enrich_summary",
    "ingest",
    "profile_column",
    "render_summary",
]
