"""Conversational refinement of an already-generated visualization.

Each turn sends the current stub plus a natural-language instruction back to
the provider, re-assembles and re-executes the result. A failed turn never
replaces the current program: the session records the failure and keeps the
last good candidate.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from vizsmith.errors import NoViableCandidate
from vizsmith.generate.codegen import _context_comment, postprocess_stub
from vizsmith.generate.executor import CandidateProgram, ExecutionLimits, execute
from vizsmith.generate.scaffolds import Scaffold
from vizsmith.goals.explorer import Goal
from vizsmith.llm.types import GenerationConfig, PromptRequest
from vizsmith.summarize.summary import DatasetSummary, render_summary

HISTORY_WINDOW = 4

REFINE_SYSTEM = (
    "You are an expert visualization developer revising existing code. Apply "
    "the user's instruction to the current code stub. Generate only the "
    "revised stub: no imports, no surrounding scaffold, no prose."
)


@dataclass(frozen=True)
class RefinementTurn:
    instruction: str
    before_stub: str
    after_stub: str
    candidate: CandidateProgram

    @property
    def succeeded(self) -> bool:
        return self.candidate.status == "compiled_ok"

    def to_dict(self) -> dict:
        return {
            "instruction": self.instruction,
            "before_stub": self.before_stub,
            "after_stub": self.after_stub,
            "status": self.candidate.status,
            "error_detail": self.candidate.error_detail,
            "succeeded": self.succeeded,
        }


def build_refinement_prompt(
    summary_text: str,
    goal: Goal,
    scaffold: Scaffold,
    current_stub: str,
    instruction: str,
    history: tuple[RefinementTurn, ...] = (),
) -> PromptRequest:
    """FIM request around the scaffold, carrying the stub to revise.

    Only the most recent HISTORY_WINDOW turns are echoed back; older
    instructions age out of the prompt.
    """
    parts = []
    if summary_text:
        parts.append(f"Dataset summary:\n```\n{summary_text}\n```")
    parts.append(
        "Visualization goal:\n"
        f"question: {goal.question}\n"
        f"visualization: {goal.visualization}"
    )
    recent = history[-HISTORY_WINDOW:]
    if recent:
        lines = "\n".join(f"- {turn.instruction}" for turn in recent)
        parts.append(f"Earlier refinement instructions already applied:\n{lines}")
    parts.append(f"Current stub:\n```\n{current_stub}\n```")
    parts.append(f"Instruction: {instruction}\nGenerate only the revised stub.")
    context = f"Dataset summary:\n{summary_text}" if summary_text else ""
    return PromptRequest(
        system=REFINE_SYSTEM,
        messages=(("user", "\n\n".join(parts)),),
        mode="fill_in_middle",
        fim_prefix=_context_comment(scaffold, context) + scaffold.preamble,
        fim_suffix=scaffold.postamble,
        metadata=(
            ("task", "refinement"),
            ("grammar_id", scaffold.grammar_id),
            ("instruction", instruction),
        ),
    )


def refine(
    summary: DatasetSummary,
    condition: str,
    goal: Goal,
    candidate: CandidateProgram,
    instruction: str,
    scaffold: Scaffold,
    provider,
    config: GenerationConfig | None = None,
    limits: ExecutionLimits | None = None,
    *,
    history: tuple[RefinementTurn, ...] = (),
    dataset_path: str | None = None,
    work_root: str | None = None,
) -> RefinementTurn:
    """One refinement turn: revise, re-assemble, re-execute.

    Returns the successful turn. A revision that fails to execute raises
    NoViableCandidate carrying the failed candidate so callers can keep the
    previous program.
    """
    if not instruction.strip():
        raise ValueError("refinement instruction must be non-empty")
    base = config or GenerationConfig()
    cfg = replace(base, n_candidates=1)
    summary_text = render_summary(summary, condition)
    request = build_refinement_prompt(
        summary_text, goal, scaffold, candidate.stub, instruction, history
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
        raise NoViableCandidate("refinement produced an empty stub", [failed])
    revised = replace(
        candidate,
        stub=stub,
        assembled_code=scaffold.preamble + stub + scaffold.postamble,
        status="pending",
        error_detail=None,
        artifact=None,
        correctness_score=None,
    )
    executed = execute(
        revised,
        scaffold,
        dataset_path or summary.source_path,
        limits=limits,
        work_root=work_root,
    )
    turn = RefinementTurn(
        instruction=instruction,
        before_stub=candidate.stub,
        after_stub=executed.stub,
        candidate=executed,
    )
    if executed.status != "compiled_ok":
        raise NoViableCandidate(
            f"refined program failed with {executed.status}", [executed]
        )
    return turn


class RefinementSession:
    """Running transcript of refinement turns over one candidate.

    Failed turns are recorded in the transcript but never advance the
    current program.
    """

    def __init__(
        self,
        summary: DatasetSummary,
        condition: str,
        goal: Goal,
        candidate: CandidateProgram,
        scaffold: Scaffold,
        provider,
        config: GenerationConfig | None = None,
        limits: ExecutionLimits | None = None,
        *,
        dataset_path: str | None = None,
        work_root: str | None = None,
    ) -> None:
        self.summary = summary
        self.condition = condition
        self.goal = goal
        self.current = candidate
        self.scaffold = scaffold
        self.provider = provider
        self.config = config
        self.limits = limits
        self.dataset_path = dataset_path
        self.work_root = work_root
        self.turns: list[RefinementTurn] = []

    def apply(self, instruction: str) -> RefinementTurn:
        try:
            turn = refine(
                self.summary,
                self.condition,
                self.goal,
                self.current,
                instruction,
                self.scaffold,
                self.provider,
                self.config,
                self.limits,
                history=tuple(self.turns),
                dataset_path=self.dataset_path,
                work_root=self.work_root,
            )
        except NoViableCandidate as exc:
            failed = exc.candidates[0]
            turn = RefinementTurn(
                instruction=instruction,
                before_stub=self.current.stub,
                after_stub=failed.stub,
                candidate=failed,
            )
            self.turns.append(turn)
            return turn
        self.turns.append(turn)
        self.current = turn.candidate
        return turn
