"""Full generation pass: prompt, sample, assemble, execute, filter."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

from vizsmith.errors import EmptyStub, NoViableCandidate
from vizsmith.generate.codegen import assemble, build_codegen_prompt, postprocess_stub
from vizsmith.generate.executor import CandidateProgram, ExecutionLimits, execute
from vizsmith.generate.filters import (
    FilterPolicy,
    select_by_consistency,
    select_by_correctness,
    select_first_compiled,
)
from vizsmith.generate.scaffolds import ScaffoldRegistry, get_scaffold
from vizsmith.goals.explorer import Goal
from vizsmith.llm.types import GenerationConfig
from vizsmith.summarize.summary import DatasetSummary, render_summary


def generate_visualization(
    summary: DatasetSummary,
    condition: str,
    goal: Goal,
    grammar_id: str,
    policy: FilterPolicy,
    provider,
    config: GenerationConfig | None = None,
    limits: ExecutionLimits | None = None,
    *,
    dataset_path: str | None = None,
    registry: ScaffoldRegistry | None = None,
    work_root: str | None = None,
    max_workers: int = 1,
) -> CandidateProgram:
    """Produce one vetted candidate for (summary, goal, grammar).

    Every sampled completion becomes a candidate with a terminal status
    (assembly failures are compile errors); the policy then picks a winner
    or NoViableCandidate is raised carrying all executed candidates.
    """
    scaffold = get_scaffold(grammar_id, registry)
    base = config or GenerationConfig()
    gen_config = replace(
        base,
        n_candidates=policy.n_candidates,
        temperature=policy.effective_temperature(base.temperature),
    )
    summary_text = render_summary(summary, condition)
    prompt = build_codegen_prompt(summary_text, goal, scaffold)
    response = provider.generate(prompt, gen_config)

    candidates: list[CandidateProgram] = []
    for text in response.candidates:
        stub = postprocess_stub(text)
        try:
            assembled = assemble(scaffold, stub)
        except EmptyStub:
            candidates.append(
                CandidateProgram(
                    goal_index=goal.index,
                    scaffold_ref=scaffold.grammar_id,
                    stub="",
                    assembled_code=scaffold.preamble + scaffold.postamble,
                    status="compile_error",
                    error_detail="empty stub after post-processing",
                )
            )
            continue
        candidates.append(
            CandidateProgram(
                goal_index=goal.index,
                scaffold_ref=scaffold.grammar_id,
                stub=stub,
                assembled_code=assembled,
            )
        )

    data_path = dataset_path or summary.source_path

    def run(candidate: CandidateProgram) -> CandidateProgram:
        if candidate.status != "pending":
            return candidate
        return execute(candidate, scaffold, data_path, limits, work_root)

    if max_workers > 1 and len(candidates) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            executed = list(pool.map(run, candidates))
    else:
        executed = [run(c) for c in candidates]

    if policy.kind == "compile_discard":
        return select_first_compiled(executed)
    if policy.kind == "self_consistency":
        return select_by_consistency(executed)
    return select_by_correctness(executed, provider, context=goal.visualization)
