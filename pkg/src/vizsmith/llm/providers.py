"""Provider implementations behind the text model port.

TextProvider is the only surface the pipeline sees. LiveProvider talks to an
OpenAI-style chat endpoint over http; ReplayProvider serves recorded
cassettes; HybridProvider replays first and falls through to a live provider
on a miss, recording what it fetched. ScriptedProvider exists for tests and
fault injection.

All providers are safe to call from multiple threads and never return more
than config.n_candidates texts.
"""

from __future__ import annotations

import threading
import time
from typing import Callable, Protocol, runtime_checkable

import httpx

from vizsmith.errors import CassetteMiss, ProviderUnavailable, TokenBudgetExceeded
from vizsmith.llm.cassette import Cassette
from vizsmith.llm.fingerprint import fingerprint
from vizsmith.llm.types import GenerationConfig, PromptRequest, ProviderResponse


@runtime_checkable
class TextProvider(Protocol):
    def generate(self, request: PromptRequest, config: GenerationConfig) -> ProviderResponse:
        """Return 1..n_candidates completions for the request."""
        ...


def request_summary(request: PromptRequest) -> str:
    """Short human-readable label stored next to cassette entries."""
    task = request.metadata_dict().get("task", "untagged")
    head = request.last_user_text().splitlines()[0][:80] if request.last_user_text() else ""
    return f"{task}: {head}" if head else task


class _CallLog:
    """Mixin recording every request a provider served, for tests."""

    def __init__(self) -> None:
        self.calls: list[PromptRequest] = []
        self._log_lock = threading.Lock()

    def _log(self, request: PromptRequest) -> None:
        with self._log_lock:
            self.calls.append(request)


class ReplayProvider(_CallLog):
    """Serves recorded responses only; a miss is a hard error."""

    def __init__(self, cassette: Cassette):
        super().__init__()
        self.cassette = cassette

    def generate(self, request: PromptRequest, config: GenerationConfig) -> ProviderResponse:
        self._log(request)
        fp = fingerprint(request, config)
        hit = self.cassette.lookup(fp)
        if hit is None:
            raise CassetteMiss(fp, request_summary(request))
        return ProviderResponse(
            candidates=hit.candidates[: config.n_candidates],
            usage=dict(hit.usage),
            provider_meta={"provider": "replay", "fingerprint": fp},
        )


class LiveProvider(_CallLog):
    """OpenAI-compatible chat completions client with bounded backoff."""

    def __init__(
        self,
        base_url: str,
        api_key: str = "",
        *,
        timeout_s: float = 60.0,
        max_retries: int = 3,
        transport: httpx.BaseTransport | None = None,
    ):
        super().__init__()
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.max_retries = max_retries
        self._client = httpx.Client(timeout=timeout_s, transport=transport)

    def _payload(self, request: PromptRequest, config: GenerationConfig) -> dict:
        messages = [{"role": "system", "content": request.system}]
        for role, text in request.messages:
            messages.append({"role": role, "content": text})
        if request.mode == "fill_in_middle":
            # chat endpoints have no native infill; frame the hole explicitly
            framing = (
                "Fill in the code that belongs between PREFIX and SUFFIX. "
                "Reply with only that code.\n"
                f"PREFIX:\n{request.fim_prefix}\nSUFFIX:\n{request.fim_suffix}"
            )
            messages.append({"role": "user", "content": framing})
        payload = {
            "model": config.model_id,
            "messages": messages,
            "temperature": config.temperature,
            "n": config.n_candidates,
            "max_tokens": config.max_tokens,
        }
        if config.seed is not None:
            payload["seed"] = config.seed
        return payload

    def generate(self, request: PromptRequest, config: GenerationConfig) -> ProviderResponse:
        self._log(request)
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = self._payload(request, config)
        last_error: Exception | None = None
        for attempt in range(self.max_retries):
            try:
                reply = self._client.post(
                    f"{self.base_url}/chat/completions", json=payload, headers=headers
                )
            except httpx.HTTPError as exc:
                last_error = exc
                time.sleep(0.25 * (2**attempt))
                continue
            if reply.status_code >= 500:
                last_error = ProviderUnavailable(f"server error {reply.status_code}")
                time.sleep(0.25 * (2**attempt))
                continue
            if reply.status_code >= 400:
                body = reply.text.lower()
                if reply.status_code == 413 or "context" in body and "length" in body:
                    raise TokenBudgetExceeded(reply.text[:500])
                raise ProviderUnavailable(f"request rejected ({reply.status_code}): {reply.text[:500]}")
            data = reply.json()
            texts = [choice["message"]["content"] for choice in data.get("choices", [])]
            if not texts:
                raise ProviderUnavailable("provider returned no choices")
            usage = data.get("usage", {})
            return ProviderResponse(
                candidates=tuple(texts[: config.n_candidates]),
                usage={
                    "prompt_tokens": int(usage.get("prompt_tokens", 0)),
                    "completion_tokens": int(usage.get("completion_tokens", 0)),
                },
                provider_meta={"provider": "live", "model": data.get("model", config.model_id)},
            )
        raise ProviderUnavailable(f"provider unreachable after {self.max_retries} attempts: {last_error}")


class HybridProvider(_CallLog):
    """Replay when recorded, otherwise call live and record the answer."""

    def __init__(self, cassette: Cassette, live: TextProvider):
        super().__init__()
        self.cassette = cassette
        self.live = live
        self.replay = ReplayProvider(cassette)

    def generate(self, request: PromptRequest, config: GenerationConfig) -> ProviderResponse:
        self._log(request)
        try:
            return self.replay.generate(request, config)
        except CassetteMiss:
            pass
        response = self.live.generate(request, config)
        fp = fingerprint(request, config)
        self.cassette.record(fp, request_summary(request), response)
        return response


class RecordingProvider(_CallLog):
    """Always calls the inner provider and records into the cassette."""

    def __init__(self, inner: TextProvider, cassette: Cassette):
        super().__init__()
        self.inner = inner
        self.cassette = cassette

    def generate(self, request: PromptRequest, config: GenerationConfig) -> ProviderResponse:
        self._log(request)
        response = self.inner.generate(request, config)
        self.cassette.record(fingerprint(request, config), request_summary(request), response)
        return response


ResponderFn = Callable[[PromptRequest, GenerationConfig], "list[str] | ProviderResponse"]


class ScriptedProvider(_CallLog):
    """Test double driven by a queue of texts or a responder callable."""

    def __init__(self, script: list | ResponderFn | None = None):
        super().__init__()
        self._fn: ResponderFn | None = script if callable(script) else None
        self._queue: list = list(script) if isinstance(script, list) else []
        self._queue_lock = threading.Lock()

    def push(self, *texts: str) -> None:
        with self._queue_lock:
            self._queue.extend(texts)

    def generate(self, request: PromptRequest, config: GenerationConfig) -> ProviderResponse:
        self._log(request)
        if self._fn is not None:
            produced = self._fn(request, config)
            if isinstance(produced, ProviderResponse):
                return ProviderResponse(
                    candidates=produced.candidates[: config.n_candidates],
                    usage=dict(produced.usage),
                    provider_meta=dict(produced.provider_meta),
                )
            texts = list(produced)
        else:
            with self._queue_lock:
                if not self._queue:
                    raise ProviderUnavailable("scripted provider ran out of responses")
                head = self._queue.pop(0)
                texts = list(head) if isinstance(head, (list, tuple)) else [head]
        texts = texts[: config.n_candidates]
        if not texts:
            raise ProviderUnavailable("scripted provider produced no text")
        prompt_tokens = (len(request.system) + sum(len(t) for _, t in request.messages)) // 4
        return ProviderResponse(
            candidates=tuple(texts),
            usage={
                "prompt_tokens": prompt_tokens,
                "completion_tokens": sum(len(t) for t in texts) // 4,
            },
            provider_meta={"provider": "scripted"},
        )
