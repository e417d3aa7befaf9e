"""Generate and validate visualization goals for a summarized dataset.

A goal is three texts: the question being asked, a visualization directive
naming a chart type and the dataset fields it uses, and a rationale. Replies
are parsed defensively (markdown fences stripped, first JSON array taken)
and filtered: a goal whose visualization mentions none of the dataset's
field names is treated as hallucinated and dropped.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from vizsmith.errors import AllGoalsRejected, NoParsableJSON
from vizsmith.llm.types import GenerationConfig, PromptRequest
from vizsmith.summarize.summary import DatasetSummary, render_summary, strip_code_fences

GOAL_KEYS = ("question", "visualization", "rationale")

_TOKEN_RE = re.compile(r"[a-z0-9_]+")

GOAL_SYSTEM = (
    "You are a highly experienced visualization specialist and data analyst. "
    "You propose insightful data exploration goals grounded only in the fields "
    "of the dataset summary you are given. Apply visualization best practices: "
    "prefer simple expressive chart types, avoid pie charts, and avoid 3d effects."
)


@dataclass(frozen=True)
class Goal:
    index: int
    question: str
    visualization: str
    rationale: str

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "question": self.question,
            "visualization": self.visualization,
            "rationale": self.rationale,
        }

    @classmethod
    def from_dict(cls, data: dict, index: int | None = None) -> "Goal":
        return cls(
            index=index if index is not None else int(data.get("index", 0)),
            question=data["question"],
            visualization=data["visualization"],
            rationale=data["rationale"],
        )


@dataclass(frozen=True)
class GoalParseReport:
    goals: tuple[Goal, ...]
    n_rejected_schema: int
    n_rejected_fields: int


def build_goal_prompt(
    summary_text: str, n_goals: int, persona_hint: str | None = None
) -> PromptRequest:
    """Completion prompt asking for exactly n_goals JSON goal records.

    The summary text is embedded verbatim; one worked example links the
    directive and rationale to a field symbol so the model mirrors real
    field names.
    """
    if n_goals < 1:
        raise ValueError("n_goals must be a positive integer")
    persona = f"Tailor the goals to this persona: {persona_hint}.\n\n" if persona_hint else ""
    body = (
        "Dataset summary:\n```\n"
        f"{summary_text}\n"
        "```\n\n"
        f"{persona}"
        f"Generate exactly {n_goals} visualization goals for this dataset as a JSON array. "
        'Each element must be an object with keys "question", "visualization" and '
        '"rationale". The "visualization" value must name the chart type and the exact '
        "dataset field names it uses, spelled exactly as they appear in the summary. "
        "The rationale must explain, using the same field names, why the chart answers "
        "the question.\n\n"
        "Example of one goal, where X stands for a real field name:\n"
        '{"question": "How is X distributed?", "visualization": "histogram of X", '
        '"rationale": "a histogram of X shows the spread and outliers of X"}\n\n'
        "Reply with the JSON array only."
    )
    return PromptRequest(
        system=GOAL_SYSTEM,
        messages=(("user", body),),
        metadata=(("task", "goal-generation"), ("n_goals", str(n_goals))),
    )


def _extract_json_array(raw: str) -> list:
    text = strip_code_fences(raw).strip()
    start = text.find("[")
    end = text.rfind("]")
    if start == -1 or end == -1 or end < start:
        raise NoParsableJSON("reply holds no JSON array")
    try:
        parsed = json.loads(text[start : end + 1])
    except json.JSONDecodeError as exc:
        raise NoParsableJSON(f"reply array does not parse: {exc}") from exc
    if not isinstance(parsed, list):
        raise NoParsableJSON("reply JSON is not an array")
    return parsed


def references_known_field(text: str, field_names: list[str]) -> bool:
    """Case-insensitive exact token match against the field-name set.

    Field names containing non-word characters fall back to substring
    matching on the lowercased text.
    """
    tokens = set(_TOKEN_RE.findall(text.lower()))
    lowered = text.lower()
    for name in field_names:
        low = name.lower()
        if _TOKEN_RE.fullmatch(low):
            if low in tokens:
                return True
        elif low in lowered:
            return True
    return False


def parse_goals_report(raw: str, summary: DatasetSummary) -> GoalParseReport:
    records = _extract_json_array(raw)
    names = summary.field_names()
    accepted: list[Goal] = []
    rejected_schema = 0
    rejected_fields = 0
    for record in records:
        if not isinstance(record, dict) or any(
            not isinstance(record.get(key), str) or not record[key].strip() for key in GOAL_KEYS
        ):
            rejected_schema += 1
            continue
        if not references_known_field(record["visualization"], names):
            rejected_fields += 1
            continue
        accepted.append(
            Goal(
                index=len(accepted),
                question=record["question"].strip(),
                visualization=record["visualization"].strip(),
                rationale=record["rationale"].strip(),
            )
        )
    if records and not accepted:
        raise AllGoalsRejected(
            f"all {len(records)} goals rejected "
            f"({rejected_schema} malformed, {rejected_fields} referencing unknown fields)"
        )
    if not records:
        raise NoParsableJSON("reply array holds no goal records")
    return GoalParseReport(
        goals=tuple(accepted),
        n_rejected_schema=rejected_schema,
        n_rejected_fields=rejected_fields,
    )


def parse_goals(raw: str, summary: DatasetSummary) -> list[Goal]:
    """Parse, validate, and filter goal records; indices come out dense."""
    return list(parse_goals_report(raw, summary).goals)


def explore_goals(
    summary: DatasetSummary,
    condition: str,
    n_goals: int,
    provider,
    config: GenerationConfig | None = None,
    persona_hint: str | None = None,
) -> list[Goal]:
    """Render the summary under a condition, ask for goals, parse, truncate."""
    cfg = config or GenerationConfig(temperature=0.0, n_candidates=1)
    prompt = build_goal_prompt(render_summary(summary, condition), n_goals, persona_hint)
    response = provider.generate(prompt, cfg)
    goals = parse_goals(response.candidates[0], summary)
    goals = goals[:n_goals]
    return [Goal(index=i, question=g.question, visualization=g.visualization, rationale=g.rationale) for i, g in enumerate(goals)]
