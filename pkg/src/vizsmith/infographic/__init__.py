"""Chart stylization: style library, request builder, image provider port."""

from vizsmith.infographic.providers import (
    IdentityIgmProvider,
    IgmProvider,
    ImageStore,
    InvertIgmProvider,
    RecordingIgmProvider,
    ReplayIgmProvider,
    igm_fingerprint,
    image_size,
    stylize,
)
from vizsmith.infographic.request import (
    DEFAULT_PROMPT_WORD_CAP,
    DEFAULT_STRENGTH,
    SAFE_STRENGTH_BAND,
    IgmRequest,
    compose_request,
)
from vizsmith.infographic.styles import StyleEntry, StyleLibrary, default_library

__all__ = [
    "DEFAULT_PROMPT_WORD_CAP",
    "DEFAULT_STRENGTH",
    "SAFE_STRENGTH_BAND",
    "IdentityIgmProvider",
    "IgmProvider",
    "IgmRequest",
    "ImageStore",
    "InvertIgmProvider",
    "RecordingIgmProvider",
    "ReplayIgmProvider",
    "StyleEntry",
    "StyleLibrary",
    "compose_request",
    "default_library",
    "igm_fingerprint",
    "image_size",
    "stylize",
]
