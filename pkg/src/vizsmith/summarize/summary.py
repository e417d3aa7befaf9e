"""Dataset summaries: enrichment, user refinement, and prompt rendering.

A DatasetSummary starts as the pure Stage 1 profile. One optional provider
call can add a dataset description plus per-field descriptions and semantic
types (enrichment_status "llm_enriched"); user edits move it to
"user_refined". Stage 1 stats are never modified after profiling.

render_summary produces the text injected into prompts under one of four
conditions: no_summary (empty), schema (field names only), no_enrich (stats
and samples), enrich (stats plus any descriptions). The rendering never
includes absolute row or null counts, only row-count-invariant figures
(min/max, distinct counts, null percentage), so its length depends on the
schema and sample_n alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from vizsmith.errors import EnrichmentParseFailure, UnknownField
from vizsmith.llm.types import GenerationConfig, PromptRequest
from vizsmith.summarize.profile import FieldProfile

CONDITIONS = ("no_enrich", "enrich", "schema", "no_summary")

ENRICHMENT_STATUSES = ("base", "llm_enriched", "user_refined")

ENRICHMENT_SYSTEM = (
    "You annotate dataset profiles. Given field statistics, reply with a JSON "
    "object holding a one-sentence dataset_description and a fields array of "
    '{"name", "description", "semantic_type"} objects, one per field, using '
    "short lowercase semantic type labels. Reply with JSON only."
)


@dataclass
class DatasetSummary:
    name: str
    source_path: str
    description: str | None
    fields: list[FieldProfile]
    row_count: int
    enrichment_status: str = "base"
    enrichment_warning: str | None = None

    def field_names(self) -> list[str]:
        return [f.name for f in self.fields]

    def field(self, name: str) -> FieldProfile:
        for profile in self.fields:
            if profile.name == name:
                return profile
        raise UnknownField(f"summary has no field named {name!r}")

    def to_dict(self) -> dict:
        data = {
            "name": self.name,
            "source_path": self.source_path,
            "description": self.description,
            "fields": [f.to_dict() for f in self.fields],
            "row_count": self.row_count,
            "enrichment_status": self.enrichment_status,
        }
        if self.enrichment_warning is not None:
            data["enrichment_warning"] = self.enrichment_warning
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "DatasetSummary":
        return cls(
            name=data["name"],
            source_path=data["source_path"],
            description=data.get("description"),
            fields=[FieldProfile.from_dict(f) for f in data["fields"]],
            row_count=data["row_count"],
            enrichment_status=data.get("enrichment_status", "base"),
            enrichment_warning=data.get("enrichment_warning"),
        )

    def clone(self) -> "DatasetSummary":
        return DatasetSummary.from_dict(self.to_dict())


def build_enrichment_prompt(summary: DatasetSummary) -> PromptRequest:
    body = (
        "Dataset profile:\n```\n"
        + render_summary(summary, "no_enrich")
        + "\n```\n\n"
        + "Reply with a JSON object with keys dataset_description and fields."
    )
    return PromptRequest(
        system=ENRICHMENT_SYSTEM,
        messages=(("user", body),),
        metadata=(("task", "summary-enrichment"), ("dataset", summary.name)),
    )


def strip_code_fences(text: str) -> str:
    """Return the body of the first fenced block, or the text unchanged."""
    if "```" not in text:
        return text
    lines = text.splitlines()
    inside = False
    body: list[str] = []
    for line in lines:
        if line.strip().startswith("```"):
            if inside:
                break
            inside = True
            continue
        if inside:
            body.append(line)
    return "\n".join(body) if body else text


def _parse_enrichment(raw: str) -> dict:
    try:
        parsed = json.loads(strip_code_fences(raw).strip())
    except json.JSONDecodeError as exc:
        raise EnrichmentParseFailure(str(exc)) from exc
    if not isinstance(parsed, dict):
        raise EnrichmentParseFailure("enrichment reply is not a JSON object")
    return parsed


def enrich_summary(summary: DatasetSummary, provider, config: GenerationConfig | None = None) -> DatasetSummary:
    """Single provider call merging descriptions and semantic types.

    Only description and semantic_type fields are merged; stats are
    untouched. A malformed reply is non-fatal: the input summary comes back
    unchanged except for enrichment_warning.
    """
    cfg = config or GenerationConfig(temperature=0.0, n_candidates=1)
    response = provider.generate(build_enrichment_prompt(summary), cfg)
    enriched = summary.clone()
    try:
        parsed = _parse_enrichment(response.candidates[0])
    except EnrichmentParseFailure as failure:
        enriched.enrichment_warning = f"enrichment reply unusable: {failure}"
        return enriched
    keep_user = summary.enrichment_status == "user_refined"
    description = parsed.get("dataset_description")
    if isinstance(description, str) and description.strip():
        if not (keep_user and enriched.description):
            enriched.description = description.strip()
    by_name = {f.name: f for f in enriched.fields}
    for entry in parsed.get("fields", []) or []:
        if not isinstance(entry, dict):
            continue
        target = by_name.get(entry.get("name"))
        if target is None:
            continue  # unknown field names in the reply are ignored
        desc = entry.get("description")
        if isinstance(desc, str) and desc.strip() and not (keep_user and target.description):
            target.description = desc.strip()
        sem = entry.get("semantic_type")
        if isinstance(sem, str) and sem.strip() and not (keep_user and target.semantic_type):
            target.semantic_type = sem.strip()
    enriched.enrichment_status = "llm_enriched"
    return enriched


def apply_user_refinement(summary: DatasetSummary, edits: dict) -> DatasetSummary:
    """Apply user edits to descriptions and semantic types.

    edits = {"description": str?, "fields": {name: {"description"?,
    "semantic_type"?}}}. Unknown field names raise UnknownField.
    """
    refined = summary.clone()
    if "description" in edits and edits["description"] is not None:
        refined.description = str(edits["description"])
    by_name = {f.name: f for f in refined.fields}
    for name, change in (edits.get("fields") or {}).items():
        if name not in by_name:
            raise UnknownField(f"summary has no field named {name!r}")
        target = by_name[name]
        if change.get("description") is not None:
            target.description = str(change["description"])
        if change.get("semantic_type") is not None:
            target.semantic_type = str(change["semantic_type"])
    refined.enrichment_status = "user_refined"
    return refined


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _field_line(profile: FieldProfile) -> str:
    stats = profile.stats
    parts = [f"- name: {profile.name}", f"type: {profile.atomic_type}"]
    if stats.min is not None:
        parts.append(f"min: {_format_value(stats.min)}")
    if stats.max is not None:
        parts.append(f"max: {_format_value(stats.max)}")
    parts.append(f"unique: {stats.n_unique}")
    null_pct = (100.0 * stats.n_null / stats.n_rows) if stats.n_rows else 0.0
    parts.append(f"nulls: {null_pct:.1f}%")
    rendered = ", ".join(_format_value(v) for v in profile.samples)
    parts.append(f"samples: {rendered}")
    return " | ".join(parts)


def render_summary(summary: DatasetSummary, condition: str) -> str:
    """Render the summary text for one ablation condition."""
    if condition not in CONDITIONS:
        raise ValueError(f"unknown summary condition {condition!r}")
    if condition == "no_summary":
        return ""
    if condition == "schema":
        return f"Dataset: {summary.name}\nFields: {', '.join(summary.field_names())}"
    lines = [f"Dataset: {summary.name}", f"Fields ({len(summary.fields)}):"]
    if condition == "enrich" and summary.description:
        lines.insert(1, f"Description: {summary.description}")
    for profile in summary.fields:
        lines.append(_field_line(profile))
        if condition == "enrich" and (profile.semantic_type or profile.description):
            extra = []
            if profile.semantic_type:
                extra.append(f"semantic_type: {profile.semantic_type}")
            if profile.description:
                extra.append(f"description: {profile.description}")
            lines.append("  " + " | ".join(extra))
    return "\n".join(lines)
