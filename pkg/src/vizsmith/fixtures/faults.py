"""Fault injection wrapper: corrupt scheduled code-generation replies.

The injection schedule is the oracle for error-rate tests: corrupting
exactly k of T code-generation calls must produce an error rate of exactly
k/T x 100.
"""

from __future__ import annotations

import threading
from typing import Iterable

from vizsmith.llm.types import GenerationConfig, PromptRequest, ProviderResponse

BROKEN_STUB = "{ this stub is deliberately broken ]"


class FaultInjectingProvider:
    """Pass-through provider that breaks chosen code-generation calls.

    Ordinals are 1-based positions in the sequence of code-generation
    requests seen by this wrapper; all other task families pass through
    untouched.
    """

    def __init__(self, inner, error_ordinals: Iterable[int]):
        self.inner = inner
        self.error_ordinals = frozenset(error_ordinals)
        self.n_codegen = 0
        self._lock = threading.Lock()

    def generate(self, request: PromptRequest, config: GenerationConfig) -> ProviderResponse:
        if request.metadata_dict().get("task") == "code-generation":
            with self._lock:
                self.n_codegen += 1
                ordinal = self.n_codegen
            if ordinal in self.error_ordinals:
                return ProviderResponse(
                    candidates=(BROKEN_STUB,) * config.n_candidates,
                    usage={"prompt_tokens": 1, "completion_tokens": 1},
                    provider_meta={"backend": "fault-injector"},
                )
        return self.inner.generate(request, config)
