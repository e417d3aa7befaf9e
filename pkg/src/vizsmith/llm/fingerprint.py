"""Stable fingerprints for provider requests.

The fingerprint keys cassette lookups, so it has to be identical across
platforms, processes, and insertion orders. We serialize the request and
config into canonical JSON (sorted keys, tight separators, ascii escapes)
and hash that; message bodies are embedded verbatim so whitespace inside a
prompt stays significant.
"""

from __future__ import annotations

import hashlib
import json

from vizsmith.llm.types import GenerationConfig, PromptRequest


def canonical_form(request: PromptRequest, config: GenerationConfig) -> str:
    """Render the (request, config) pair as canonical JSON text."""
    doc = {
        "config": {
            "max_tokens": config.max_tokens,
            "model_id": config.model_id,
            "n_candidates": config.n_candidates,
            "seed": config.seed,
            "temperature": config.temperature,
        },
        "request": {
            "fim_prefix": request.fim_prefix,
            "fim_suffix": request.fim_suffix,
            "messages": [[role, text] for role, text in request.messages],
            "metadata": dict(sorted(request.metadata)),
            "mode": request.mode,
            "system": request.system,
        },
    }
    return json.dumps(doc, sort_keys=True, ensure_ascii=True, separators=(",", ":"))


def fingerprint(request: PromptRequest, config: GenerationConfig) -> str:
    """Hex sha256 of the canonical form."""
    return hashlib.sha256(canonical_form(request, config).encode("utf-8")).hexdigest()
