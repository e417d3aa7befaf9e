"""Elicit a correctness probability for a piece of code from the provider."""

from __future__ import annotations

import re

from vizsmith.errors import UnparseableScore
from vizsmith.llm.types import GenerationConfig, PromptRequest

_NUMBER = re.compile(r"[-+]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?")

SCORING_SYSTEM = (
    "You judge whether a piece of visualization code correctly fulfills its goal. "
    "Reply with a single probability between 0 and 1 that the code is correct, "
    "and nothing else."
)


def build_scoring_prompt(code: str, context: str) -> PromptRequest:
    body = ""
    if context:
        body += f"Goal:\n{context}\n\n"
    body += f"Code:\n```\n{code}\n```\n\nProbability that the code is correct:"
    return PromptRequest(
        system=SCORING_SYSTEM,
        messages=(("user", body),),
        metadata=(("task", "correctness-scoring"),),
    )


def parse_probability(reply: str) -> float:
    """First real number in the reply, clamped to [0, 1]."""
    match = _NUMBER.search(reply)
    if match is None:
        raise UnparseableScore(f"no number in scoring reply: {reply[:120]!r}")
    return max(0.0, min(1.0, float(match.group())))


def score_correctness(code: str, context: str, provider, config: GenerationConfig | None = None) -> float:
    """Ask the provider for a correctness probability in [0, 1].

    Raises UnparseableScore when the reply holds no number; callers that
    rank candidates treat that as a score of 0.
    """
    cfg = config or GenerationConfig(temperature=0.0, n_candidates=1, max_tokens=16)
    if cfg.n_candidates != 1:
        from dataclasses import replace

        cfg = replace(cfg, n_candidates=1)
    response = provider.generate(build_scoring_prompt(code, context), cfg)
    return parse_probability(response.candidates[0])
