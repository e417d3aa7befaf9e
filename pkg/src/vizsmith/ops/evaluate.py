"""Multi-dimensional self-evaluation of generated visualization code.

Six dimensions, one provider call each, every reply parsed to an integer
score in 1..10 plus a rationale. The aggregate (sevq) is the arithmetic mean
of the dimension scores. The dimension question texts are bundled resources
loaded verbatim; do not edit them casually, downstream comparisons pin their
bytes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from statistics import fmean

from vizsmith.errors import ScoreParseFailure
from vizsmith.goals.explorer import Goal
from vizsmith.llm.types import GenerationConfig, PromptRequest

DIMENSIONS = (
    "code_accuracy",
    "data_transformation",
    "goal_compliance",
    "visualization_type",
    "data_encoding",
    "aesthetics",
)

SCORE_MIN, SCORE_MAX = 1, 10

EVALUATION_SYSTEM = (
    "You are a meticulous visualization reviewer. Answer the question about "
    "the given code and goal, then give an integer score from 1 (worst) to 10 "
    "(best). Start your reply with the score, a colon, and your rationale."
)

_INT_RE = re.compile(r"-?\d+")
_PREFIXED = re.compile(r"^\s*(\d{1,2})\s*[:\-]\s*(.*)$", re.DOTALL)


def dimension_prompt(dimension: str) -> str:
    """The bundled question text for one dimension, byte-for-byte."""
    if dimension not in DIMENSIONS:
        raise ValueError(f"unknown evaluation dimension {dimension!r}")
    path = resources.files("vizsmith.ops").joinpath(f"prompts/{dimension}.txt")
    return path.read_text(encoding="utf-8")


@dataclass(frozen=True)
class DimensionScore:
    dimension: str
    score: int
    rationale: str

    def __post_init__(self) -> None:
        if not SCORE_MIN <= self.score <= SCORE_MAX:
            raise ValueError(f"score {self.score} outside {SCORE_MIN}..{SCORE_MAX}")

    def to_dict(self) -> dict:
        return {"dimension": self.dimension, "score": self.score, "rationale": self.rationale}


@dataclass(frozen=True)
class EvaluationReport:
    scores: tuple[DimensionScore, ...]
    sevq: float
    partial: bool = False
    failed_dimensions: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "scores": [s.to_dict() for s in self.scores],
            "sevq": self.sevq,
            "partial": self.partial,
            "failed_dimensions": list(self.failed_dimensions),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvaluationReport":
        return cls(
            scores=tuple(
                DimensionScore(dimension=s["dimension"], score=s["score"], rationale=s["rationale"])
                for s in data["scores"]
            ),
            sevq=data["sevq"],
            partial=data.get("partial", False),
            failed_dimensions=tuple(data.get("failed_dimensions", ())),
        )


def build_dimension_prompt(dimension: str, code: str, goal: Goal) -> PromptRequest:
    body = (
        f"{dimension_prompt(dimension)}\n\n"
        f"Visualization goal:\n"
        f"question: {goal.question}\n"
        f"visualization: {goal.visualization}\n\n"
        f"Code:\n```\n{code}\n```\n\n"
        "Reply with an integer score from 1 to 10, a colon, then your rationale."
    )
    return PromptRequest(
        system=EVALUATION_SYSTEM,
        messages=(("user", body),),
        metadata=(("task", "evaluation"), ("dimension", dimension)),
    )


def parse_dimension_reply(dimension: str, reply: str) -> DimensionScore:
    """First integer in the reply as the score; must land in 1..10."""
    match = _INT_RE.search(reply)
    if match is None:
        raise ScoreParseFailure(dimension, reply)
    value = int(match.group())
    if not SCORE_MIN <= value <= SCORE_MAX:
        raise ScoreParseFailure(dimension, reply)
    prefixed = _PREFIXED.match(reply)
    rationale = prefixed.group(2).strip() if prefixed else reply.strip()
    return DimensionScore(dimension=dimension, score=value, rationale=rationale)


def evaluate(code: str, goal: Goal, provider, config: GenerationConfig | None = None) -> EvaluationReport:
    """Score the code on all six dimensions; one provider call per dimension.

    Unparseable replies drop their dimension and mark the report partial;
    sevq then averages the dimensions that did parse.
    """
    if not code.strip():
        raise ValueError("cannot evaluate empty code")
    cfg = config or GenerationConfig(temperature=0.0, n_candidates=1)
    scores: list[DimensionScore] = []
    failed: list[str] = []
    for dimension in DIMENSIONS:
        response = provider.generate(build_dimension_prompt(dimension, code, goal), cfg)
        try:
            scores.append(parse_dimension_reply(dimension, response.candidates[0]))
        except ScoreParseFailure:
            failed.append(dimension)
    if not scores:
        raise ScoreParseFailure("all", "every dimension reply was unparseable")
    return EvaluationReport(
        scores=tuple(scores),
        sevq=fmean(s.score for s in scores),
        partial=bool(failed),
        failed_dimensions=tuple(failed),
    )
