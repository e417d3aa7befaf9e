"""Model provider port: request/response types, fingerprints, cassettes."""

from vizsmith.llm.cassette import Cassette
from vizsmith.llm.fingerprint import canonical_form, fingerprint
from vizsmith.llm.providers import (
    HybridProvider,
    LiveProvider,
    RecordingProvider,
    ReplayProvider,
    ScriptedProvider,
    TextProvider,
)
from vizsmith.llm.scoring import score_correctness
from vizsmith.llm.types import GenerationConfig, PromptRequest, ProviderResponse

__all__ = [
    "Cassette",
    "GenerationConfig",
    "HybridProvider",
    "LiveProvider",
    "PromptRequest",
    "ProviderResponse",
    "RecordingProvider",
    "ReplayProvider",
    "ScriptedProvider",
    "TextProvider",
    "canonical_form",
    "fingerprint",
    "score_correctness",
]
