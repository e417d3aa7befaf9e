"""Follow-up visualization recommendations for an existing session.

Given the dataset summary and the goals already explored, ask the provider
for fresh goals that do not repeat earlier ones. Replies go through the same
schema and known-field filtering as initial goal exploration.
"""

from __future__ import annotations

import json

from vizsmith.goals.explorer import GOAL_SYSTEM, Goal, parse_goals
from vizsmith.llm.types import GenerationConfig, PromptRequest
from vizsmith.summarize.summary import DatasetSummary, render_summary


def build_recommendation_prompt(
    summary_text: str, prior_goals: tuple[Goal, ...], n_goals: int
) -> PromptRequest:
    prior = [
        {"question": g.question, "visualization": g.visualization}
        for g in prior_goals
    ]
    body = (
        "Dataset summary:\n```\n"
        f"{summary_text}\n"
        "```\n\n"
        "Goals already explored:\n"
        f"{json.dumps(prior, sort_keys=True, indent=2)}\n\n"
        f"Recommend exactly {n_goals} new visualization goals that are not "
        "redundant with the goals above. Reply with a JSON array of objects, "
        'each with string fields "question", "visualization" and "rationale". '
        "Reference only field names that appear in the dataset summary."
    )
    return PromptRequest(
        system=GOAL_SYSTEM,
        messages=(("user", body),),
        metadata=(("task", "recommendation"), ("n_goals", str(n_goals))),
    )


def recommend(
    summary: DatasetSummary,
    condition: str,
    prior_goals: tuple[Goal, ...],
    n_goals: int,
    provider,
    config: GenerationConfig | None = None,
) -> list[Goal]:
    """Up to n_goals new goals, re-indexed after the prior ones."""
    if n_goals < 1:
        raise ValueError("n_goals must be >= 1")
    cfg = config or GenerationConfig(temperature=0.0, n_candidates=1)
    summary_text = render_summary(summary, condition)
    request = build_recommendation_prompt(summary_text, tuple(prior_goals), n_goals)
    response = provider.generate(request, cfg)
    goals = parse_goals(response.candidates[0], summary)
    offset = len(prior_goals)
    return [
        Goal(
            index=offset + i,
            question=g.question,
            visualization=g.visualization,
            rationale=g.rationale,
        )
        for i, g in enumerate(goals[:n_goals])
    ]
