"""Plain-language explanation of a generated visualization program.

One provider call returns markdown with two required sections: a code
walkthrough and an accessibility description of the rendered chart. The
section headers are matched case-insensitively; a reply missing either
section is a parse failure, never silently repackaged.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from vizsmith.errors import ExplanationParseFailure
from vizsmith.goals.explorer import Goal
from vizsmith.llm.types import GenerationConfig, PromptRequest

EXPLAIN_SYSTEM = (
    "You are a visualization educator. Explain the given code to a reader who "
    "cannot run it, then describe the resulting chart for a reader who cannot "
    "see it. Reply in markdown with exactly two sections: "
    "'## Code walkthrough' and '## Accessibility description'."
)

WALKTHROUGH_HEADER = "code walkthrough"
ACCESSIBILITY_HEADER = "accessibility description"

_SECTION_RE = re.compile(r"^\s{0,3}#{2,3}\s+(.+?)\s*$", re.MULTILINE)


@dataclass(frozen=True)
class Explanation:
    walkthrough: str
    accessibility: str

    def to_dict(self) -> dict:
        return {"walkthrough": self.walkthrough, "accessibility": self.accessibility}


def build_explanation_prompt(code: str, goal: Goal) -> PromptRequest:
    body = (
        f"Visualization goal:\n"
        f"question: {goal.question}\n"
        f"visualization: {goal.visualization}\n\n"
        f"Code:\n```\n{code}\n```\n\n"
        "Explain the code step by step under '## Code walkthrough', then "
        "describe the chart for a screen-reader user under "
        "'## Accessibility description'."
    )
    return PromptRequest(
        system=EXPLAIN_SYSTEM,
        messages=(("user", body),),
        metadata=(("task", "explanation"),),
    )


def parse_explanation(raw: str) -> Explanation:
    """Split the reply on its two required markdown section headers."""
    sections: dict[str, str] = {}
    matches = list(_SECTION_RE.finditer(raw))
    for i, match in enumerate(matches):
        title = match.group(1).strip().lower().rstrip(":")
        start = match.end()
        end = matches[i + 1].start() if i + 1 < len(matches) else len(raw)
        sections[title] = raw[start:end].strip()
    walkthrough = sections.get(WALKTHROUGH_HEADER, "")
    accessibility = sections.get(ACCESSIBILITY_HEADER, "")
    if not walkthrough or not accessibility:
        raise ExplanationParseFailure(raw)
    return Explanation(walkthrough=walkthrough, accessibility=accessibility)


def explain(code: str, goal: Goal, provider, config: GenerationConfig | None = None) -> Explanation:
    if not code.strip():
        raise ValueError("cannot explain empty code")
    cfg = config or GenerationConfig(temperature=0.0, n_candidates=1)
    response = provider.generate(build_explanation_prompt(code, goal), cfg)
    return parse_explanation(response.candidates[0])
