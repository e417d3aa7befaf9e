"""Critique-driven repair of a weak or broken visualization program.

The repair loop feeds evaluation rationales (and any execution error) back to
the provider and re-executes the revised stub. Depth d allows d+1 attempts;
each later attempt also sees the error detail from the attempt before it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from vizsmith.errors import NoViableCandidate
from vizsmith.generate.codegen import _context_comment, postprocess_stub
from vizsmith.generate.executor import (
    ERROR_STATUSES,
    CandidateProgram,
    ExecutionLimits,
    execute,
)
from vizsmith.generate.scaffolds import Scaffold
from vizsmith.goals.explorer import Goal
from vizsmith.llm.types import GenerationConfig, PromptRequest
from vizsmith.ops.evaluate import EvaluationReport
from vizsmith.summarize.summary import DatasetSummary, render_summary

DEFAULT_MAX_DEPTH = 2

# dimension scores at or below this feed their rationale back as a critique
CRITIQUE_THRESHOLD = 7

REPAIR_SYSTEM = (
    "You are an expert visualization developer fixing existing code. Address "
    "every critique while preserving the goal. Generate only the corrected "
    "stub: no imports, no surrounding scaffold, no prose."
)


@dataclass(frozen=True)
class RepairResult:
    candidate: CandidateProgram
    n_attempts: int
    critiques: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "candidate": self.candidate.to_dict(),
            "n_attempts": self.n_attempts,
            "critiques": list(self.critiques),
        }


def collect_critiques(
    candidate: CandidateProgram, report: EvaluationReport | None
) -> tuple[str, ...]:
    """Rationales worth acting on: weak dimensions, else the single weakest.

    An execution failure on the candidate itself is always a critique.
    """
    critiques: list[str] = []
    if candidate.status in ERROR_STATUSES:
        detail = candidate.error_detail or candidate.status
        critiques.append(f"execution failed ({candidate.status}): {detail}")
    if report is not None and report.scores:
        weak = [s for s in report.scores if s.score <= CRITIQUE_THRESHOLD]
        if not weak:
            weak = [min(report.scores, key=lambda s: s.score)]
        critiques.extend(f"{s.dimension}: {s.rationale}" for s in weak)
    return tuple(critiques)


def build_repair_prompt(
    summary_text: str,
    goal: Goal,
    scaffold: Scaffold,
    current_stub: str,
    critiques: tuple[str, ...],
    previous_error: str | None = None,
) -> PromptRequest:
    parts = []
    if summary_text:
        parts.append(f"Dataset summary:\n```\n{summary_text}\n```")
    parts.append(
        "Visualization goal:\n"
        f"question: {goal.question}\n"
        f"visualization: {goal.visualization}"
    )
    parts.append(f"Current stub:\n```\n{current_stub}\n```")
    critique_lines = "\n".join(f"- {c}" for c in critiques)
    parts.append(f"Critiques to address:\n{critique_lines}")
    if previous_error:
        parts.append(f"The previous repair attempt failed:\n{previous_error}")
    parts.append("Generate only the corrected stub.")
    context = f"Dataset summary:\n{summary_text}" if summary_text else ""
    return PromptRequest(
        system=REPAIR_SYSTEM,
        messages=(("user", "\n\n".join(parts)),),
        mode="fill_in_middle",
        fim_prefix=_context_comment(scaffold, context) + scaffold.preamble,
        fim_suffix=scaffold.postamble,
        metadata=(("task", "repair"), ("grammar_id", scaffold.grammar_id)),
    )


def repair(
    summary: DatasetSummary,
    condition: str,
    goal: Goal,
    candidate: CandidateProgram,
    scaffold: Scaffold,
    provider,
    report: EvaluationReport | None = None,
    config: GenerationConfig | None = None,
    limits: ExecutionLimits | None = None,
    *,
    max_depth: int = DEFAULT_MAX_DEPTH,
    dataset_path: str | None = None,
    work_root: str | None = None,
) -> RepairResult:
    """Regenerate the stub against the critiques until it executes.

    Depth 0 means exactly one attempt. Every attempt failing raises
    NoViableCandidate carrying the failed candidates in order.
    """
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    critiques = collect_critiques(candidate, report)
    if not critiques:
        raise ValueError("nothing to repair: no critiques and no execution error")
    base = config or GenerationConfig()
    cfg = replace(base, n_candidates=1)
    summary_text = render_summary(summary, condition)
    data_path = dataset_path or summary.source_path
    previous_error: str | None = None
    current_stub = candidate.stub
    failures: list[CandidateProgram] = []
    for attempt in range(max_depth + 1):
        request = build_repair_prompt(
            summary_text, goal, scaffold, current_stub, critiques, previous_error
        )
        response = provider.generate(request, cfg)
        stub = postprocess_stub(response.candidates[0])
        if not stub.strip():
            failed = replace(
                candidate,
                stub="",
                assembled_code=scaffold.preamble + scaffold.postamble,
                status="compile_error",
                error_detail="empty stub after post-processing",
                artifact=None,
                correctness_score=None,
            )
            failures.append(failed)
            previous_error = failed.error_detail
            continue
        revised = replace(
            candidate,
            stub=stub,
            assembled_code=scaffold.preamble + stub + scaffold.postamble,
            status="pending",
            error_detail=None,
            artifact=None,
            correctness_score=None,
        )
        executed = execute(revised, scaffold, data_path, limits=limits, work_root=work_root)
        if executed.status == "compiled_ok":
            return RepairResult(
                candidate=executed, n_attempts=attempt + 1, critiques=critiques
            )
        failures.append(executed)
        previous_error = f"{executed.status}: {executed.error_detail or ''}".strip()
        current_stub = executed.stub
    raise NoViableCandidate(
        f"repair exhausted after {max_depth + 1} attempts", failures
    )
