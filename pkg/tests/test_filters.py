"""Candidate selection policies and the generation pipeline composition."""

from __future__ import annotations

import json
import random

import pytest

from vizsmith.bench import corpus_path
from vizsmith.errors import NoViableCandidate
from vizsmith.generate import (
    CandidateProgram,
    FilterPolicy,
    generate_visualization,
    normalize_for_consensus,
    select_by_consistency,
    select_by_correctness,
    select_first_compiled,
)
from vizsmith.goals import Goal
from vizsmith.llm import GenerationConfig, ScriptedProvider
from vizsmith.summarize import build_base_summary, ingest

GOAL = Goal(index=0, question="q", visualization="histogram of mpg", rationale="r")


def candidate(i: int, code: str, status: str = "compiled_ok") -> CandidateProgram:
    return CandidateProgram(
        goal_index=i,
        scaffold_ref="chart-json",
        stub=code,
        assembled_code=code,
        status=status,
        artifact=f"a{i}.json" if status == "compiled_ok" else None,
    )


def test_policy_preconditions():
    with pytest.raises(ValueError):
        FilterPolicy(kind="self_consistency", n_candidates=1)
    with pytest.raises(ValueError):
        FilterPolicy(kind="correctness_probability", n_candidates=1)
    with pytest.raises(ValueError):
        FilterPolicy(kind="majority", n_candidates=3)
    assert FilterPolicy(kind="compile_discard", n_candidates=1).n_candidates == 1


def test_compile_discard_temperature_default():
    single = FilterPolicy(kind="compile_discard", n_candidates=1)
    multi = FilterPolicy(kind="compile_discard", n_candidates=3)
    pinned = FilterPolicy(kind="compile_discard", n_candidates=3, temperature_override=0.2)
    assert single.effective_temperature(0.0) == 0.0
    assert multi.effective_temperature(0.0) == 0.7
    assert pinned.effective_temperature(0.0) == 0.2


def test_normalization_ignores_whitespace_and_comments():
    assert normalize_for_consensus("x=1") == normalize_for_consensus("x  =  1")
    assert normalize_for_consensus("x = 1  # set x") == normalize_for_consensus("x=1")
    assert normalize_for_consensus("a\n\n\nb") == normalize_for_consensus("a\nb")
    assert normalize_for_consensus("x=1") != normalize_for_consensus("x=2")


def test_first_compiled_skips_broken_candidates():
    pool = [candidate(0, "a", "compile_error"), candidate(1, "b"), candidate(2, "c")]
    assert select_first_compiled(pool).stub == "b"


def test_consistency_majority_cluster_wins():
    pool = [candidate(0, "x = 1"), candidate(1, "x=1"), candidate(2, "y = 2")]
    assert select_by_consistency(pool).goal_index == 0


def test_consistency_all_distinct_falls_back_to_lowest_index():
    pool = [candidate(0, "a=1"), candidate(1, "b=2"), candidate(2, "c=3")]
    assert select_by_consistency(pool).goal_index == 0


def test_consistency_tie_breaks_toward_lowest_index():
    pool = [candidate(0, "a=1"), candidate(1, "b=2"), candidate(2, "a = 1"), candidate(3, "b =2")]
    # two clusters of size 2; cluster containing index 0 wins
    assert select_by_consistency(pool).goal_index == 0


def test_consistency_ignores_uncompiled_members():
    pool = [
        candidate(0, "z=9", "runtime_error"),
        candidate(1, "z=9", "runtime_error"),
        candidate(2, "w=1"),
    ]
    assert select_by_consistency(pool).goal_index == 2


def test_consistency_with_no_compiled_candidates_raises():
    pool = [candidate(0, "a", "compile_error")]
    with pytest.raises(NoViableCandidate) as err:
        select_by_consistency(pool)
    assert len(err.value.candidates) == 1


def brute_force_consistency(pool):
    # oracle: enumerate clusters explicitly, max size then min index
    compiled = [c for c in pool if c.status == "compiled_ok"]
    groups = {}
    for c in compiled:
        groups.setdefault(normalize_for_consensus(c.assembled_code), []).append(c)
    best_key = None
    for key, members in groups.items():
        if best_key is None:
            best_key = key
            continue
        best = groups[best_key]
        if len(members) > len(best) or (
            len(members) == len(best) and pool.index(members[0]) < pool.index(best[0])
        ):
            best_key = key
    return groups[best_key][0]


def test_consistency_matches_brute_force_on_random_pools():
    rng = random.Random(13)
    snippets = ["x=1", "x = 1", "y=2", "y =2  # c", "z=3"]
    for _ in range(300):
        size = rng.randint(1, 6)
        pool = [candidate(i, rng.choice(snippets)) for i in range(size)]
        assert select_by_consistency(pool) is brute_force_consistency(pool)


def test_correctness_takes_argmax_of_scores():
    pool = [candidate(0, "a=1"), candidate(1, "b=2"), candidate(2, "c=3")]
    provider = ScriptedProvider(["0.2", "0.9", "0.5"])
    winner = select_by_correctness(pool, provider)
    assert winner.goal_index == 1
    assert winner.correctness_score == pytest.approx(0.9)


def test_correctness_tie_breaks_toward_lowest_index():
    pool = [candidate(0, "a=1"), candidate(1, "b=2")]
    provider = ScriptedProvider(["0.7", "0.7"])
    assert select_by_correctness(pool, provider).goal_index == 0


def test_correctness_unparseable_scores_count_as_zero():
    pool = [candidate(0, "a=1"), candidate(1, "b=2")]
    provider = ScriptedProvider(["no idea", "0.1"])
    assert select_by_correctness(pool, provider).goal_index == 1


def spec_reply(mark: str = "bar") -> str:
    return json.dumps({"mark": mark, "encoding": {"x": {"field": "mpg", "bin": True}}})


def test_pipeline_compile_discard_end_to_end(tmp_path):
    summary = build_base_summary(ingest(corpus_path("cars.csv")))
    provider = ScriptedProvider(lambda req, cfg: [spec_reply()])
    policy = FilterPolicy(kind="compile_discard", n_candidates=1)
    winner = generate_visualization(
        summary, "no_enrich", GOAL, "chart-json", policy, provider, work_root=str(tmp_path)
    )
    assert winner.status == "compiled_ok"
    assert winner.artifact is not None


def test_pipeline_discards_broken_then_keeps_good(tmp_path):
    summary = build_base_summary(ingest(corpus_path("cars.csv")))
    provider = ScriptedProvider(lambda req, cfg: ['{"mark": ', spec_reply(), spec_reply("line")])
    policy = FilterPolicy(kind="compile_discard", n_candidates=3)
    winner = generate_visualization(
        summary, "no_enrich", GOAL, "chart-json", policy, provider, work_root=str(tmp_path)
    )
    assert winner.status == "compiled_ok"
    assert json.loads(winner.stub)["mark"] == "bar"


def test_pipeline_all_broken_raises_with_candidates(tmp_path):
    summary = build_base_summary(ingest(corpus_path("cars.csv")))
    provider = ScriptedProvider(lambda req, cfg: ['{"mark": ', "also broken ["])
    policy = FilterPolicy(kind="compile_discard", n_candidates=2)
    with pytest.raises(NoViableCandidate) as err:
        generate_visualization(
            summary, "no_enrich", GOAL, "chart-json", policy, provider, work_root=str(tmp_path)
        )
    assert len(err.value.candidates) == 2
    assert all(c.status == "compile_error" for c in err.value.candidates)


def test_pipeline_empty_stub_becomes_compile_error(tmp_path):
    summary = build_base_summary(ingest(corpus_path("cars.csv")))
    provider = ScriptedProvider(lambda req, cfg: ["   \n", spec_reply()])
    policy = FilterPolicy(kind="compile_discard", n_candidates=2)
    winner = generate_visualization(
        summary, "no_enrich", GOAL, "chart-json", policy, provider, work_root=str(tmp_path)
    )
    assert winner.status == "compiled_ok"


def test_pipeline_applies_policy_temperature(tmp_path):
    summary = build_base_summary(ingest(corpus_path("cars.csv")))
    seen = {}

    def responder(req, cfg):
        seen["temperature"] = cfg.temperature
        seen["n"] = cfg.n_candidates
        return [spec_reply()] * cfg.n_candidates

    provider = ScriptedProvider(responder)
    policy = FilterPolicy(kind="compile_discard", n_candidates=3)
    generate_visualization(
        summary,
        "no_enrich",
        GOAL,
        "chart-json",
        policy,
        provider,
        GenerationConfig(temperature=0.0),
        work_root=str(tmp_path),
    )
    assert seen == {"temperature": 0.7, "n": 3}


def test_pipeline_self_consistency_policy(tmp_path):
    summary = build_base_summary(ingest(corpus_path("cars.csv")))
    variant_a = spec_reply()
    variant_b = spec_reply("line")
    provider = ScriptedProvider(lambda req, cfg: [variant_b, variant_a, variant_a])
    policy = FilterPolicy(kind="self_consistency", n_candidates=3)
    winner = generate_visualization(
        summary, "no_enrich", GOAL, "chart-json", policy, provider, work_root=str(tmp_path)
    )
    assert json.loads(winner.stub)["mark"] == "bar"
