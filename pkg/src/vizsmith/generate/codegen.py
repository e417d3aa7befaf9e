"""Fill-in-the-middle prompt construction and stub assembly."""

from __future__ import annotations

import json
import re

from vizsmith.errors import EmptyStub
from vizsmith.goals.explorer import Goal
from vizsmith.llm.types import PromptRequest
from vizsmith.generate.scaffolds import Scaffold

CODEGEN_SYSTEM = (
    "You are an expert visualization developer. You complete only the stub "
    "region of a code scaffold; the surrounding prefix and suffix are fixed. "
    "Apply visualization best practices: label axes, add a clear title, avoid "
    "pie charts, and use only field names present in the dataset summary. "
    "Reply with the stub code only, no fences and no prose."
)

_COMMENT_PREFIXES = {"python": "# "}

# a prose line: words and sentence punctuation only, nothing code-like
_PROSE_RE = re.compile(r"^[A-Za-z][A-Za-z ,.'!?-]*:?$")


def _context_comment(scaffold: Scaffold, text: str) -> str:
    prefix = _COMMENT_PREFIXES.get(scaffold.language_id)
    if prefix is None or not text:
        return ""
    return "".join(f"{prefix}{line}\n" for line in text.splitlines())


def build_codegen_prompt(summary_text: str, goal: Goal, scaffold: Scaffold) -> PromptRequest:
    """FIM request whose prefix/suffix are the scaffold halves.

    The summary and goal travel both in the user message (for chat-style
    providers) and, for commentable languages, as comments folded into the
    prefix so infill models see them in-band.
    """
    goal_json = json.dumps(
        {"question": goal.question, "visualization": goal.visualization, "rationale": goal.rationale},
        sort_keys=True,
    )
    context = ""
    if summary_text:
        context += f"Dataset summary:\n{summary_text}\n"
    context += f"Goal: {goal_json}"
    body = (
        "Dataset summary:\n```\n"
        f"{summary_text}\n"
        "```\n\n"
        f"Visualization goal:\n{goal_json}\n\n"
        f"Complete the code stub for the {scaffold.grammar_id} grammar. "
        "Generate only the stub."
    )
    return PromptRequest(
        system=CODEGEN_SYSTEM,
        messages=(("user", body),),
        mode="fill_in_middle",
        fim_prefix=_context_comment(scaffold, context) + scaffold.preamble,
        fim_suffix=scaffold.postamble,
        metadata=(
            ("task", "code-generation"),
            ("grammar_id", scaffold.grammar_id),
            ("language_id", scaffold.language_id),
        ),
    )


def postprocess_stub(raw: str) -> str:
    """Strip markdown fences and leading prose lines from a model reply."""
    text = raw
    if "```" in text:
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
        if body:
            text = "\n".join(body)
    lines = text.splitlines()
    while lines:
        head = lines[0]
        if head.strip() and not head.startswith((" ", "\t")) and _PROSE_RE.match(head.strip()):
            lines.pop(0)
            continue
        break
    return "\n".join(lines).rstrip("\n")


def assemble(scaffold: Scaffold, stub: str) -> str:
    """Replace the stub marker with the (post-processed) stub verbatim."""
    if not stub.strip():
        raise EmptyStub("no code left for the stub region")
    return scaffold.preamble + stub + scaffold.postamble
