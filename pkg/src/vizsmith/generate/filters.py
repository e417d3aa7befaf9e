"""Candidate filtering: pick one program out of several completions.

Three policies. compile_discard keeps the first candidate that executed
cleanly. self_consistency votes: candidates are normalized (comments
stripped, whitespace removed, blank lines dropped; no AST parsing so it
works for any grammar) and the largest cluster of identical normal forms
wins. correctness_probability asks the provider to score each candidate and
takes the argmax. All ties break toward the lowest candidate index.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from vizsmith.errors import NoViableCandidate, UnparseableScore
from vizsmith.generate.executor import CandidateProgram
from vizsmith.llm.scoring import score_correctness
from vizsmith.llm.types import GenerationConfig

POLICY_KINDS = ("compile_discard", "self_consistency", "correctness_probability")

# compile_discard diversifies sampling when it can discard, hence the warmer default
COMPILE_DISCARD_DEFAULT_TEMPERATURE = 0.7

_LINE_COMMENT = re.compile(r"(#|//).*$")


@dataclass(frozen=True)
class FilterPolicy:
    kind: str
    n_candidates: int = 1
    temperature_override: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown filter policy {self.kind!r}")
        if self.n_candidates < 1:
            raise ValueError("n_candidates must be a positive integer")
        if self.kind in ("self_consistency", "correctness_probability") and self.n_candidates < 2:
            raise ValueError(f"{self.kind} needs at least 2 candidates to compare")

    def effective_temperature(self, base: float) -> float:
        if self.temperature_override is not None:
            return self.temperature_override
        if self.kind == "compile_discard" and self.n_candidates > 1:
            return COMPILE_DISCARD_DEFAULT_TEMPERATURE
        return base


def normalize_for_consensus(code: str) -> str:
    """Comment-free, whitespace-free normal form used for cluster equality."""
    lines = []
    for line in code.splitlines():
        line = _LINE_COMMENT.sub("", line)
        line = re.sub(r"\s+", "", line)
        if line:
            lines.append(line)
    return "\n".join(lines)


def _compiled(candidates: list[CandidateProgram]) -> list[CandidateProgram]:
    return [c for c in candidates if c.status == "compiled_ok"]


def select_first_compiled(candidates: list[CandidateProgram]) -> CandidateProgram:
    for candidate in candidates:
        if candidate.status == "compiled_ok":
            return candidate
    raise NoViableCandidate("no candidate compiled cleanly", candidates)


def select_by_consistency(candidates: list[CandidateProgram]) -> CandidateProgram:
    """Largest cluster of normalized-identical compiled candidates.

    Cluster ties break toward the cluster containing the lowest candidate
    index; the returned member is that lowest-index candidate.
    """
    compiled = _compiled(candidates)
    if not compiled:
        raise NoViableCandidate("no candidate compiled cleanly", candidates)
    clusters: dict[str, list[CandidateProgram]] = {}
    for candidate in compiled:
        clusters.setdefault(normalize_for_consensus(candidate.assembled_code), []).append(candidate)
    best = max(
        clusters.values(),
        key=lambda members: (len(members), -candidates.index(members[0])),
    )
    return best[0]


def select_by_correctness(
    candidates: list[CandidateProgram],
    provider,
    context: str = "",
    config: GenerationConfig | None = None,
) -> CandidateProgram:
    """Argmax of elicited correctness probabilities over compiled candidates.

    An unparseable score counts as 0; ties break toward the lowest index.
    """
    compiled = _compiled(candidates)
    if not compiled:
        raise NoViableCandidate("no candidate compiled cleanly", candidates)
    scored: list[CandidateProgram] = []
    for candidate in compiled:
        try:
            score = score_correctness(candidate.assembled_code, context, provider, config)
        except UnparseableScore:
            score = 0.0
        scored.append(
            CandidateProgram(
                goal_index=candidate.goal_index,
                scaffold_ref=candidate.scaffold_ref,
                stub=candidate.stub,
                assembled_code=candidate.assembled_code,
                status=candidate.status,
                error_detail=candidate.error_detail,
                artifact=candidate.artifact,
                correctness_score=score,
            )
        )
    best = scored[0]
    for candidate in scored[1:]:
        if candidate.correctness_score > best.correctness_score:
            best = candidate
    return best
