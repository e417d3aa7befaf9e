"""Request and response types for the text model port.

These types are the identity of a model call: two calls with equal
PromptRequest and GenerationConfig values must replay to the same recorded
response. Keep them plain data; anything provider-specific belongs in
ProviderResponse.provider_meta.
"""

from __future__ import annotations

from dataclasses import dataclass, field

PROMPT_MODES = ("completion", "fill_in_middle")


@dataclass(frozen=True)
class GenerationConfig:
    """Sampling parameters; part of the request identity.

    temperature must lie in [0, 2], n_candidates and max_tokens must be
    positive. seed is optional and passed through to providers that honor it.
    """

    temperature: float = 0.0
    n_candidates: int = 1
    max_tokens: int = 2048
    model_id: str = "default"
    seed: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature {self.temperature} outside [0, 2]")
        if self.n_candidates < 1:
            raise ValueError("n_candidates must be a positive integer")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be a positive integer")


@dataclass(frozen=True)
class PromptRequest:
    """One prompt, either plain completion or fill-in-the-middle.

    For fill_in_middle requests the prefix/suffix carry the code around the
    hole and must both be set; completion requests must leave them None.
    metadata is a small string map folded into the request fingerprint
    (stage tags, grammar ids); it is never sent to a live model as prompt
    text.
    """

    system: str
    messages: tuple[tuple[str, str], ...] = ()
    mode: str = "completion"
    fim_prefix: str | None = None
    fim_suffix: str | None = None
    metadata: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if self.mode not in PROMPT_MODES:
            raise ValueError(f"unknown prompt mode {self.mode!r}")
        has_fim = self.fim_prefix is not None or self.fim_suffix is not None
        if self.mode == "fill_in_middle":
            if self.fim_prefix is None or self.fim_suffix is None:
                raise ValueError("fill_in_middle requests need fim_prefix and fim_suffix")
        elif has_fim:
            raise ValueError("completion requests must not carry fim fields")
        # normalize to tuples so instances stay hashable when built from lists
        object.__setattr__(self, "messages", tuple((r, t) for r, t in self.messages))
        object.__setattr__(self, "metadata", tuple((k, v) for k, v in self.metadata))

    def metadata_dict(self) -> dict[str, str]:
        return dict(self.metadata)

    def last_user_text(self) -> str:
        for role, text in reversed(self.messages):
            if role == "user":
                return text
        return ""


@dataclass(frozen=True)
class ProviderResponse:
    """Candidate texts plus usage accounting from one provider call."""

    candidates: tuple[str, ...]
    usage: dict = field(default_factory=dict)
    provider_meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "candidates", tuple(self.candidates))
        if not self.candidates:
            raise ValueError("a provider response must carry at least one candidate")
