"""Provider port: fingerprints, cassettes, replay, scoring, live client."""

from __future__ import annotations

import concurrent.futures
import hashlib
import json

import httpx
import pytest

from vizsmith.errors import CassetteMiss, ProviderUnavailable, TokenBudgetExceeded, UnparseableScore
from vizsmith.llm import (
    Cassette,
    GenerationConfig,
    HybridProvider,
    LiveProvider,
    PromptRequest,
    ProviderResponse,
    RecordingProvider,
    ReplayProvider,
    ScriptedProvider,
    canonical_form,
    fingerprint,
    score_correctness,
)
from vizsmith.llm.providers import request_summary
from vizsmith.llm.scoring import parse_probability


def make_request(**overrides) -> PromptRequest:
    base = dict(
        system="you are terse",
        messages=(("user", "draw a chart"),),
        metadata=(("task", "unit-test"), ("grammar_id", "chart-json")),
    )
    base.update(overrides)
    return PromptRequest(**base)


def test_fingerprint_is_deterministic_across_instances():
    a = fingerprint(make_request(), GenerationConfig())
    b = fingerprint(make_request(), GenerationConfig())
    assert a == b
    assert len(a) == 64


def test_fingerprint_matches_independent_canonical_hash():
    # oracle: hand-built canonical document hashed the same way
    request = make_request()
    config = GenerationConfig(temperature=0.5, seed=11)
    doc = {
        "config": {
            "max_tokens": 2048,
            "model_id": "default",
            "n_candidates": 1,
            "seed": 11,
            "temperature": 0.5,
        },
        "request": {
            "fim_prefix": None,
            "fim_suffix": None,
            "messages": [["user", "draw a chart"]],
            "metadata": {"grammar_id": "chart-json", "task": "unit-test"},
            "mode": "completion",
            "system": "you are terse",
        },
    }
    expected = hashlib.sha256(
        json.dumps(doc, sort_keys=True, ensure_ascii=True, separators=(",", ":")).encode()
    ).hexdigest()
    assert fingerprint(request, config) == expected


def test_metadata_key_order_does_not_change_fingerprint():
    forward = make_request(metadata=(("a", "1"), ("b", "2")))
    backward = make_request(metadata=(("b", "2"), ("a", "1")))
    cfg = GenerationConfig()
    assert fingerprint(forward, cfg) == fingerprint(backward, cfg)


def test_temperature_is_part_of_request_identity():
    request = make_request()
    cold = fingerprint(request, GenerationConfig(temperature=0.0))
    warm = fingerprint(request, GenerationConfig(temperature=0.7))
    assert cold != warm


def test_message_whitespace_is_significant():
    one = make_request(messages=(("user", "a  b"),))
    two = make_request(messages=(("user", "a b"),))
    assert fingerprint(one, GenerationConfig()) != fingerprint(two, GenerationConfig())


def test_canonical_form_is_valid_json():
    parsed = json.loads(canonical_form(make_request(), GenerationConfig()))
    assert parsed["request"]["mode"] == "completion"


def test_fim_fields_required_exactly_for_fill_in_middle():
    with pytest.raises(ValueError):
        PromptRequest(system="s", mode="fill_in_middle", fim_prefix="a")
    with pytest.raises(ValueError):
        PromptRequest(system="s", mode="completion", fim_suffix="b")
    ok = PromptRequest(system="s", mode="fill_in_middle", fim_prefix="a", fim_suffix="b")
    assert ok.fim_prefix == "a"


def test_generation_config_rejects_bad_values():
    with pytest.raises(ValueError):
        GenerationConfig(temperature=2.5)
    with pytest.raises(ValueError):
        GenerationConfig(n_candidates=0)
    with pytest.raises(ValueError):
        GenerationConfig(max_tokens=0)


def test_cassette_round_trip(tmp_path):
    cassette = Cassette()
    request = make_request()
    cfg = GenerationConfig(n_candidates=3)
    fp = fingerprint(request, cfg)
    cassette.record(
        fp,
        request_summary(request),
        ProviderResponse(candidates=("x", "y", "z"), usage={"prompt_tokens": 4, "completion_tokens": 2}),
    )
    path = tmp_path / "c.json"
    cassette.save(path)
    loaded = Cassette.load(path)
    assert loaded.lookup(fp).candidates == ("x", "y", "z")
    assert loaded.summaries[fp].startswith("unit-test")


def test_cassette_load_rejects_duplicate_fingerprints(tmp_path):
    entry = {
        "fingerprint": "f" * 64,
        "request_summary": "dup",
        "response": {"candidates": ["a"], "usage": {"prompt_tokens": 0, "completion_tokens": 0}},
    }
    path = tmp_path / "dup.json"
    path.write_text(json.dumps([entry, entry]))
    with pytest.raises(ValueError):
        Cassette.load(path)


def test_replay_hit_returns_recorded_text():
    request = make_request()
    cfg = GenerationConfig()
    cassette = Cassette()
    cassette.record(fingerprint(request, cfg), "r", ProviderResponse(candidates=("recorded",)))
    provider = ReplayProvider(cassette)
    assert provider.generate(request, cfg).candidates == ("recorded",)


def test_replay_miss_is_a_hard_error():
    provider = ReplayProvider(Cassette())
    with pytest.raises(CassetteMiss):
        provider.generate(make_request(), GenerationConfig())


def test_multi_candidate_replay_preserves_order():
    request = make_request(messages=(("user", "three please"),))
    cfg = GenerationConfig(n_candidates=3, temperature=0.7)
    cassette = Cassette()
    scripted = ScriptedProvider(lambda req, c: ["one", "two", "three"])
    recorder = RecordingProvider(scripted, cassette)
    recorded = recorder.generate(request, cfg)
    replayed = ReplayProvider(cassette).generate(request, cfg)
    assert replayed.candidates == recorded.candidates == ("one", "two", "three")


def test_providers_never_exceed_n_candidates():
    scripted = ScriptedProvider(lambda req, c: ["a", "b", "c", "d"])
    response = scripted.generate(make_request(), GenerationConfig(n_candidates=2))
    assert response.candidates == ("a", "b")


def test_hybrid_falls_through_once_then_replays():
    request = make_request()
    cfg = GenerationConfig()
    live = ScriptedProvider(lambda req, c: ["fresh"])
    hybrid = HybridProvider(Cassette(), live)
    first = hybrid.generate(request, cfg)
    second = hybrid.generate(request, cfg)
    assert first.candidates == ("fresh",)
    assert second.candidates == ("fresh",)
    assert len(live.calls) == 1


def test_replay_is_thread_safe_under_concurrent_lookups():
    request = make_request()
    cfg = GenerationConfig()
    cassette = Cassette()
    cassette.record(fingerprint(request, cfg), "r", ProviderResponse(candidates=("t",)))
    provider = ReplayProvider(cassette)
    with concurrent.futures.ThreadPoolExecutor(max_workers=8) as pool:
        results = list(pool.map(lambda _: provider.generate(request, cfg).candidates[0], range(64)))
    assert results == ["t"] * 64


def test_score_correctness_parses_plain_number():
    provider = ScriptedProvider(["0.92"])
    assert score_correctness("code", "goal", provider) == pytest.approx(0.92)


def test_score_correctness_clamps_to_unit_interval():
    def clamp_oracle(x: float) -> float:
        return max(0.0, min(1.0, x))

    provider = ScriptedProvider(["1.7", "-0.3"])
    assert score_correctness("c", "", provider) == clamp_oracle(1.7) == 1.0
    assert score_correctness("c", "", provider) == clamp_oracle(-0.3) == 0.0


def test_score_correctness_without_number_raises():
    provider = ScriptedProvider(["certainly correct"])
    with pytest.raises(UnparseableScore):
        score_correctness("c", "", provider)


def test_parse_probability_takes_first_number():
    assert parse_probability("I estimate 0.8, maybe 0.9") == pytest.approx(0.8)


def _mock_live(handler) -> LiveProvider:
    return LiveProvider("http://model.test/v1", api_key="k", transport=httpx.MockTransport(handler))


def test_live_provider_sends_chat_payload_and_parses_choices():
    seen = {}

    def handler(http_request: httpx.Request) -> httpx.Response:
        seen["payload"] = json.loads(http_request.content)
        seen["auth"] = http_request.headers.get("authorization")
        return httpx.Response(
            200,
            json={
                "model": "m",
                "choices": [{"message": {"content": "hello"}}],
                "usage": {"prompt_tokens": 7, "completion_tokens": 1},
            },
        )

    provider = _mock_live(handler)
    response = provider.generate(make_request(), GenerationConfig(model_id="m", temperature=0.3))
    assert response.candidates == ("hello",)
    assert seen["payload"]["model"] == "m"
    assert seen["payload"]["temperature"] == 0.3
    assert seen["payload"]["messages"][0]["role"] == "system"
    assert seen["auth"] == "Bearer k"


def test_live_provider_retries_transient_failures():
    attempts = {"n": 0}

    def handler(http_request: httpx.Request) -> httpx.Response:
        attempts["n"] += 1
        if attempts["n"] < 3:
            return httpx.Response(500, text="boom")
        return httpx.Response(200, json={"choices": [{"message": {"content": "ok"}}], "usage": {}})

    provider = _mock_live(handler)
    assert provider.generate(make_request(), GenerationConfig()).candidates == ("ok",)
    assert attempts["n"] == 3


def test_live_provider_maps_context_overflow_to_token_budget():
    def handler(http_request: httpx.Request) -> httpx.Response:
        return httpx.Response(400, text="maximum context length exceeded")

    with pytest.raises(TokenBudgetExceeded):
        _mock_live(handler).generate(make_request(), GenerationConfig())


def test_live_provider_gives_up_after_bounded_retries():
    def handler(http_request: httpx.Request) -> httpx.Response:
        return httpx.Response(503, text="down")

    with pytest.raises(ProviderUnavailable):
        _mock_live(handler).generate(make_request(), GenerationConfig())


def test_live_provider_frames_fim_requests_explicitly():
    seen = {}

    def handler(http_request: httpx.Request) -> httpx.Response:
        seen["payload"] = json.loads(http_request.content)
        return httpx.Response(200, json={"choices": [{"message": {"content": "stub"}}], "usage": {}})

    request = PromptRequest(
        system="s",
        messages=(("user", "goal"),),
        mode="fill_in_middle",
        fim_prefix="PRE",
        fim_suffix="POST",
    )
    _mock_live(handler).generate(request, GenerationConfig())
    framed = seen["payload"]["messages"][-1]["content"]
    assert "PRE" in framed and "POST" in framed
