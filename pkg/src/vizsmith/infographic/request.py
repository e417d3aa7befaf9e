"""Image-to-image request construction for chart stylization."""

from __future__ import annotations

from dataclasses import dataclass

from vizsmith.errors import StrengthOutOfRange
from vizsmith.infographic.styles import StyleLibrary, default_library

DEFAULT_STRENGTH = 0.35

# deviation band that keeps the underlying data readable; outside it the
# request still builds but carries a warning
SAFE_STRENGTH_BAND = (0.25, 0.45)

# keep composed style prompts parsimonious: clip to this many words
DEFAULT_PROMPT_WORD_CAP = 60


@dataclass(frozen=True)
class IgmRequest:
    base_image: bytes
    style_prompt: str
    strength: float = DEFAULT_STRENGTH
    seed: int | None = None
    strength_warning: bool = False

    def __post_init__(self) -> None:
        if not 0.0 <= self.strength <= 1.0:
            raise StrengthOutOfRange(self.strength)
        if not self.base_image:
            raise ValueError("base_image must be non-empty raster bytes")
        if not self.style_prompt.strip():
            raise ValueError("style_prompt must be non-empty")

    def to_dict(self) -> dict:
        """Request metadata without the raster payload."""
        return {
            "style_prompt": self.style_prompt,
            "strength": self.strength,
            "seed": self.seed,
            "strength_warning": self.strength_warning,
        }


def _clip_words(text: str, cap: int) -> str:
    words = text.split()
    if len(words) <= cap:
        return text
    return " ".join(words[:cap])


def compose_request(
    artifact: bytes,
    style_ids: list[str],
    custom_prompt: str | None = None,
    strength: float = DEFAULT_STRENGTH,
    seed: int | None = None,
    *,
    library: StyleLibrary | None = None,
    word_cap: int = DEFAULT_PROMPT_WORD_CAP,
) -> IgmRequest:
    """Build an image-to-image request from library styles and a custom prompt.

    Style prompts are comma-joined in the order given, duplicates dropped;
    the custom prompt goes last. The result is clipped to word_cap words.
    """
    if not 0.0 <= strength <= 1.0:
        raise StrengthOutOfRange(strength)
    lib = library if library is not None else default_library()
    fragments: list[str] = []
    for style_id in dict.fromkeys(style_ids):
        fragments.append(lib.get(style_id).prompt)
    if custom_prompt and custom_prompt.strip():
        fragments.append(custom_prompt.strip())
    if not fragments:
        raise ValueError("need at least one style id or a custom prompt")
    prompt = _clip_words(", ".join(fragments), word_cap)
    low, high = SAFE_STRENGTH_BAND
    return IgmRequest(
        base_image=artifact,
        style_prompt=prompt,
        strength=strength,
        seed=seed,
        strength_warning=not low <= strength <= high,
    )
