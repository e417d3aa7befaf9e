"""Evaluation, refinement, repair, explanation, and recommendation flows."""

from __future__ import annotations

import pytest

from vizsmith.errors import ExplanationParseFailure, NoViableCandidate, ScoreParseFailure
from vizsmith.generate import CandidateProgram, Scaffold, assemble
from vizsmith.goals import Goal
from vizsmith.llm import GenerationConfig, ScriptedProvider
from vizsmith.ops import (
    DIMENSIONS,
    RefinementSession,
    dimension_prompt,
    evaluate,
    explain,
    recommend,
    refine,
    repair,
)
from vizsmith.ops.evaluate import DimensionScore, EvaluationReport, parse_dimension_reply
from vizsmith.ops.explain import parse_explanation
from vizsmith.ops.refine import HISTORY_WINDOW, RefinementTurn, build_refinement_prompt
from vizsmith.ops.repair import collect_critiques
from vizsmith.summarize import build_base_summary, ingest

GOAL = Goal(index=0, question="How is mpg distributed?", visualization="histogram of mpg", rationale="spread")

CODE = 'def plot(data):\n    data["mpg"].plot(kind="hist")\n    return plt.gcf()'

# same cheap scaffold trick as the generator tests: run real subprocesses
# without paying the pandas import on every execution
FAST_SCAFFOLD = Scaffold(
    grammar_id="fast-python",
    language_id="python",
    preamble="import sys\nARTIFACT_PATH = sys.argv[2]\n\ndef run():\n",
    stub_marker="<STUB>",
    postamble='\n\nrun()\nwith open(ARTIFACT_PATH, "wb") as fh:\n    fh.write(b"\\x89PNG fake")\n',
    execution_mode="subprocess",
    selftest_stub="    return None",
)

GOOD_STUB = "    x = 1"
BAD_STUB = '    raise ValueError("boom")'


@pytest.fixture()
def summary(tmp_path):
    path = tmp_path / "mini.csv"
    path.write_text("mpg,cyl\n21.0,6\n22.8,4\n18.1,6\n")
    return build_base_summary(ingest(str(path)))


def make_candidate(stub: str) -> CandidateProgram:
    return CandidateProgram(
        goal_index=0,
        scaffold_ref=FAST_SCAFFOLD.grammar_id,
        stub=stub,
        assembled_code=assemble(FAST_SCAFFOLD, stub),
    )


# --- evaluation ---------------------------------------------------------------


def test_evaluate_issues_one_call_per_dimension_in_order():
    provider = ScriptedProvider(["10: fine"] * 6)
    report = evaluate(CODE, GOAL, provider)
    assert len(provider.calls) == 6
    seen = [req.metadata_dict()["dimension"] for req in provider.calls]
    assert seen == list(DIMENSIONS)
    assert all(req.metadata_dict()["task"] == "evaluation" for req in provider.calls)
    assert report.sevq == 10.0
    assert not report.partial


def test_evaluate_mean_of_mixed_scores():
    scores = {d: s for d, s in zip(DIMENSIONS, (6, 7, 8, 9, 10, 5))}

    def responder(request, config):
        return [f"{scores[request.metadata_dict()['dimension']]}: because"]

    report = evaluate(CODE, GOAL, ScriptedProvider(responder))
    assert report.sevq == pytest.approx(7.5)
    assert [s.score for s in report.scores] == [6, 7, 8, 9, 10, 5]


def test_evaluate_prompts_embed_dimension_question_and_code():
    provider = ScriptedProvider(["5: ok"] * 6)
    evaluate(CODE, GOAL, provider)
    for request, dimension in zip(provider.calls, DIMENSIONS):
        text = request.last_user_text()
        assert dimension_prompt(dimension) in text
        assert CODE in text
        assert GOAL.question in text


def test_dimension_rationale_strips_score_prefix():
    parsed = parse_dimension_reply("aesthetics", "7: wobbly axis labels")
    assert parsed.score == 7
    assert parsed.rationale == "wobbly axis labels"


def test_dimension_reply_without_prefix_keeps_whole_text():
    parsed = parse_dimension_reply("aesthetics", "I would say 8 overall, nice palette")
    assert parsed.score == 8
    assert parsed.rationale == "I would say 8 overall, nice palette"


def test_dimension_reply_out_of_range_or_empty_fails():
    with pytest.raises(ScoreParseFailure):
        parse_dimension_reply("code_accuracy", "42: fantastic")
    with pytest.raises(ScoreParseFailure):
        parse_dimension_reply("code_accuracy", "no number here")


def test_evaluate_partial_report_on_one_bad_dimension():
    def responder(request, config):
        if request.metadata_dict()["dimension"] == "data_encoding":
            return ["hmm, unclear"]
        return ["8: fine"]

    report = evaluate(CODE, GOAL, ScriptedProvider(responder))
    assert report.partial
    assert report.failed_dimensions == ("data_encoding",)
    assert len(report.scores) == 5
    assert report.sevq == pytest.approx(8.0)


def test_evaluate_all_dimensions_unparseable_raises():
    with pytest.raises(ScoreParseFailure):
        evaluate(CODE, GOAL, ScriptedProvider(["gibberish"] * 6))


def test_evaluate_rejects_empty_code():
    with pytest.raises(ValueError):
        evaluate("   ", GOAL, ScriptedProvider(["10: fine"] * 6))


def test_evaluation_report_round_trips():
    report = EvaluationReport(
        scores=(DimensionScore("aesthetics", 9, "clean"),),
        sevq=9.0,
        partial=True,
        failed_dimensions=("code_accuracy",),
    )
    assert EvaluationReport.from_dict(report.to_dict()) == report


def test_dimension_score_range_enforced():
    with pytest.raises(ValueError):
        DimensionScore("aesthetics", 0, "too low")
    with pytest.raises(ValueError):
        DimensionScore("aesthetics", 11, "too high")


# --- refinement ----------------------------------------------------------------


def test_refine_success_updates_session(summary, tmp_path):
    provider = ScriptedProvider(["    x = 2  # larger title"])
    session = RefinementSession(
        summary, "no_enrich", GOAL, make_candidate(GOOD_STUB), FAST_SCAFFOLD,
        provider, work_root=str(tmp_path),
    )
    turn = session.apply("make the title larger")
    assert turn.succeeded
    assert turn.before_stub == GOOD_STUB
    assert session.current.stub == "    x = 2  # larger title"
    assert session.current.status == "compiled_ok"
    assert session.turns == [turn]


def test_refine_failure_rolls_back_to_previous_program(summary, tmp_path):
    provider = ScriptedProvider([BAD_STUB])
    session = RefinementSession(
        summary, "no_enrich", GOAL, make_candidate(GOOD_STUB), FAST_SCAFFOLD,
        provider, work_root=str(tmp_path),
    )
    turn = session.apply("break it")
    assert not turn.succeeded
    assert turn.candidate.status == "runtime_error"
    assert session.current.stub == GOOD_STUB
    assert len(session.turns) == 1


def test_refine_raises_with_failed_candidate_attached(summary, tmp_path):
    provider = ScriptedProvider([BAD_STUB])
    with pytest.raises(NoViableCandidate) as excinfo:
        refine(
            summary, "no_enrich", GOAL, make_candidate(GOOD_STUB),
            "break it", FAST_SCAFFOLD, provider, work_root=str(tmp_path),
        )
    assert excinfo.value.candidates[0].status == "runtime_error"


def test_refine_rejects_blank_instruction(summary, tmp_path):
    with pytest.raises(ValueError):
        refine(
            summary, "no_enrich", GOAL, make_candidate(GOOD_STUB),
            "   ", FAST_SCAFFOLD, ScriptedProvider([GOOD_STUB]),
            work_root=str(tmp_path),
        )


def test_refine_forces_single_candidate(summary, tmp_path):
    provider = ScriptedProvider(["    x = 3"])
    refine(
        summary, "no_enrich", GOAL, make_candidate(GOOD_STUB),
        "tweak", FAST_SCAFFOLD, provider,
        GenerationConfig(temperature=0.7, n_candidates=5),
        work_root=str(tmp_path),
    )
    assert len(provider.calls) == 1


def test_refinement_prompt_window_keeps_last_four_instructions():
    candidate = make_candidate(GOOD_STUB)
    turns = tuple(
        RefinementTurn(
            instruction=f"instruction number {i}",
            before_stub=GOOD_STUB,
            after_stub=GOOD_STUB,
            candidate=candidate,
        )
        for i in range(6)
    )
    request = build_refinement_prompt("", GOAL, FAST_SCAFFOLD, GOOD_STUB, "next", turns)
    text = request.last_user_text()
    for i in range(6 - HISTORY_WINDOW, 6):
        assert f"instruction number {i}" in text
    for i in range(6 - HISTORY_WINDOW):
        assert f"instruction number {i}" not in text


def test_refinement_prompt_is_fim_with_scaffold_halves():
    request = build_refinement_prompt("summary", GOAL, FAST_SCAFFOLD, GOOD_STUB, "retitle")
    assert request.mode == "fill_in_middle"
    assert request.fim_prefix.endswith(FAST_SCAFFOLD.preamble)
    assert request.fim_suffix == FAST_SCAFFOLD.postamble
    assert request.metadata_dict()["task"] == "refinement"
    assert GOOD_STUB in request.last_user_text()


def test_refine_session_transcript_interleaves_failures(summary, tmp_path):
    provider = ScriptedProvider(["    x = 2", BAD_STUB, "    x = 4"])
    session = RefinementSession(
        summary, "no_enrich", GOAL, make_candidate(GOOD_STUB), FAST_SCAFFOLD,
        provider, work_root=str(tmp_path),
    )
    session.apply("first")
    session.apply("second (fails)")
    session.apply("third")
    assert [t.succeeded for t in session.turns] == [True, False, True]
    assert session.current.stub == "    x = 4"
    # the failed turn's before stub is the surviving program, not the failure
    assert session.turns[2].before_stub == "    x = 2"


# --- repair ---------------------------------------------------------------------


def report_with(scores: dict[str, int]) -> EvaluationReport:
    entries = tuple(
        DimensionScore(d, scores.get(d, 9), f"{d} rationale") for d in DIMENSIONS
    )
    parsed = [s.score for s in entries]
    return EvaluationReport(scores=entries, sevq=sum(parsed) / len(parsed))


def test_collect_critiques_takes_all_weak_dimensions():
    candidate = make_candidate(GOOD_STUB)
    report = report_with({"visualization_type": 3, "aesthetics": 6})
    critiques = collect_critiques(candidate, report)
    assert critiques == (
        "visualization_type: visualization_type rationale",
        "aesthetics: aesthetics rationale",
    )


def test_collect_critiques_falls_back_to_single_lowest():
    candidate = make_candidate(GOOD_STUB)
    report = report_with({"data_encoding": 8})
    critiques = collect_critiques(candidate, report)
    assert critiques == ("data_encoding: data_encoding rationale",)


def test_collect_critiques_includes_execution_failure():
    candidate = CandidateProgram(
        goal_index=0,
        scaffold_ref=FAST_SCAFFOLD.grammar_id,
        stub=BAD_STUB,
        assembled_code=assemble(FAST_SCAFFOLD, BAD_STUB),
        status="runtime_error",
        error_detail="ValueError: boom",
    )
    critiques = collect_critiques(candidate, None)
    assert critiques == ("execution failed (runtime_error): ValueError: boom",)


def test_repair_depth_zero_is_exactly_one_attempt(summary, tmp_path):
    provider = ScriptedProvider([BAD_STUB])
    with pytest.raises(NoViableCandidate) as excinfo:
        repair(
            summary, "no_enrich", GOAL, make_candidate(GOOD_STUB), FAST_SCAFFOLD,
            provider, report=report_with({"aesthetics": 4}),
            max_depth=0, work_root=str(tmp_path),
        )
    assert len(provider.calls) == 1
    assert len(excinfo.value.candidates) == 1


def test_repair_exhausts_depth_plus_one_attempts(summary, tmp_path):
    provider = ScriptedProvider([BAD_STUB, BAD_STUB, BAD_STUB])
    with pytest.raises(NoViableCandidate) as excinfo:
        repair(
            summary, "no_enrich", GOAL, make_candidate(GOOD_STUB), FAST_SCAFFOLD,
            provider, report=report_with({"aesthetics": 4}),
            max_depth=2, work_root=str(tmp_path),
        )
    assert len(provider.calls) == 3
    assert [c.status for c in excinfo.value.candidates] == ["runtime_error"] * 3


def test_repair_second_attempt_sees_first_failure(summary, tmp_path):
    provider = ScriptedProvider([BAD_STUB, "    x = 5"])
    result = repair(
        summary, "no_enrich", GOAL, make_candidate(GOOD_STUB), FAST_SCAFFOLD,
        provider, report=report_with({"aesthetics": 4}),
        max_depth=2, work_root=str(tmp_path),
    )
    assert result.n_attempts == 2
    assert result.candidate.status == "compiled_ok"
    second = provider.calls[1].last_user_text()
    assert "previous repair attempt failed" in second
    assert "runtime_error" in second


def test_repair_prompt_lists_critiques(summary, tmp_path):
    provider = ScriptedProvider(["    x = 6"])
    repair(
        summary, "no_enrich", GOAL, make_candidate(GOOD_STUB), FAST_SCAFFOLD,
        provider, report=report_with({"visualization_type": 3}),
        max_depth=0, work_root=str(tmp_path),
    )
    text = provider.calls[0].last_user_text()
    assert "Critiques to address:" in text
    assert "visualization_type: visualization_type rationale" in text
    assert provider.calls[0].metadata_dict()["task"] == "repair"


def test_repair_without_critique_material_is_an_error(summary, tmp_path):
    with pytest.raises(ValueError):
        repair(
            summary, "no_enrich", GOAL, make_candidate(GOOD_STUB), FAST_SCAFFOLD,
            ScriptedProvider(["    x = 7"]), report=None,
            work_root=str(tmp_path),
        )


def test_repair_rejects_negative_depth(summary, tmp_path):
    with pytest.raises(ValueError):
        repair(
            summary, "no_enrich", GOAL, make_candidate(GOOD_STUB), FAST_SCAFFOLD,
            ScriptedProvider([]), report=report_with({"aesthetics": 4}),
            max_depth=-1, work_root=str(tmp_path),
        )


# --- explanation -----------------------------------------------------------------


GOOD_EXPLANATION = (
    "## Code walkthrough\n"
    "The stub selects the mpg column and draws a histogram.\n\n"
    "## Accessibility description\n"
    "A histogram of fuel efficiency, peaking between 20 and 25 mpg.\n"
)


def test_explain_parses_both_sections():
    result = explain(CODE, GOAL, ScriptedProvider([GOOD_EXPLANATION]))
    assert result.walkthrough.startswith("The stub selects")
    assert result.accessibility.startswith("A histogram of fuel efficiency")


def test_explanation_headers_match_case_insensitively():
    raw = (
        "## CODE WALKTHROUGH\nreads the data\n"
        "### accessibility description:\ndescribes the chart\n"
    )
    parsed = parse_explanation(raw)
    assert parsed.walkthrough == "reads the data"
    assert parsed.accessibility == "describes the chart"


def test_explanation_missing_section_raises_with_raw_text():
    raw = "## Code walkthrough\nonly half an answer\n"
    with pytest.raises(ExplanationParseFailure) as excinfo:
        parse_explanation(raw)
    assert excinfo.value.raw_text == raw


def test_explain_rejects_empty_code():
    with pytest.raises(ValueError):
        explain("", GOAL, ScriptedProvider([GOOD_EXPLANATION]))


# --- recommendation ---------------------------------------------------------------


def test_recommend_returns_reindexed_goals(summary):
    reply = (
        '[{"question": "Is mpg related to cyl?", "visualization": "scatter plot of mpg vs cyl",'
        ' "rationale": "pairwise"},'
        ' {"question": "How does cyl distribute?", "visualization": "histogram of cyl",'
        ' "rationale": "spread"}]'
    )
    prior = (GOAL,)
    goals = recommend(summary, "no_enrich", prior, 2, ScriptedProvider([reply]))
    assert [g.index for g in goals] == [1, 2]
    assert goals[0].visualization == "scatter plot of mpg vs cyl"


def test_recommend_filters_hallucinated_fields_and_truncates(summary):
    reply = (
        '[{"question": "a", "visualization": "histogram of horsepower", "rationale": "r"},'
        ' {"question": "b", "visualization": "histogram of mpg", "rationale": "r"},'
        ' {"question": "c", "visualization": "histogram of cyl", "rationale": "r"}]'
    )
    goals = recommend(summary, "no_enrich", (), 1, ScriptedProvider([reply]))
    assert len(goals) == 1
    assert goals[0].visualization == "histogram of mpg"
    assert goals[0].index == 0


def test_recommend_prompt_carries_prior_goals_and_task_tag(summary):
    provider = ScriptedProvider(
        ['[{"question": "q", "visualization": "histogram of mpg", "rationale": "r"}]']
    )
    recommend(summary, "no_enrich", (GOAL,), 1, provider)
    request = provider.calls[0]
    assert request.metadata_dict()["task"] == "recommendation"
    assert GOAL.visualization in request.last_user_text()


def test_recommend_rejects_non_positive_count(summary):
    with pytest.raises(ValueError):
        recommend(summary, "no_enrich", (), 0, ScriptedProvider([]))
