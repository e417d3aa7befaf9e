"""Image-generation provider port and its replay machinery.

The port is deliberately tiny: PNG bytes in, PNG bytes out, same pixel
dimensions. No diffusion model ships with the package; live backends plug in
behind the same protocol the deterministic fixtures use.
"""

from __future__ import annotations

import base64
import hashlib
import io
import json
import threading
from pathlib import Path
from typing import Callable, Protocol, runtime_checkable

from PIL import Image, ImageOps

from vizsmith.errors import CassetteMiss, ProviderUnavailable
from vizsmith.infographic.request import IgmRequest


@runtime_checkable
class IgmProvider(Protocol):
    def stylize(self, image: bytes, prompt: str, strength: float, seed: int | None) -> bytes:
        """Return a stylized PNG with the same pixel dimensions as the input."""
        ...


def image_size(png: bytes) -> tuple[int, int]:
    with Image.open(io.BytesIO(png)) as img:
        return img.size


def igm_fingerprint(image: bytes, prompt: str, strength: float, seed: int | None) -> str:
    doc = {
        "image_sha256": hashlib.sha256(image).hexdigest(),
        "prompt": prompt,
        "strength": repr(strength),
        "seed": seed,
    }
    blob = json.dumps(doc, sort_keys=True, ensure_ascii=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class IdentityIgmProvider:
    """Fixture provider: the stylized image is the input, unchanged."""

    def stylize(self, image: bytes, prompt: str, strength: float, seed: int | None) -> bytes:
        return image


class InvertIgmProvider:
    """Deterministic non-identity fixture: inverts colors, keeps dimensions.

    Stands in for a diffusion backend in demos and recorded fixtures so the
    dimension-preservation contract is exercised on an image that actually
    changed.
    """

    def stylize(self, image: bytes, prompt: str, strength: float, seed: int | None) -> bytes:
        with Image.open(io.BytesIO(image)) as img:
            inverted = ImageOps.invert(img.convert("RGB"))
            out = io.BytesIO()
            inverted.save(out, format="PNG")
            return out.getvalue()


class ImageStore:
    """Fingerprint-keyed PNG store, serialized as base64 JSON."""

    def __init__(self, entries: dict[str, bytes] | None = None):
        self.entries: dict[str, bytes] = dict(entries or {})
        self._lock = threading.Lock()

    def put(self, fingerprint: str, png: bytes) -> None:
        with self._lock:
            existing = self.entries.get(fingerprint)
            if existing is not None and existing != png:
                raise ValueError(f"conflicting image for fingerprint {fingerprint}")
            self.entries[fingerprint] = png

    def get(self, fingerprint: str) -> bytes | None:
        with self._lock:
            return self.entries.get(fingerprint)

    def save(self, path: str | Path) -> None:
        with self._lock:
            doc = {fp: base64.b64encode(png).decode("ascii") for fp, png in self.entries.items()}
        Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "ImageStore":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls({fp: base64.b64decode(b64) for fp, b64 in doc.items()})


class ReplayIgmProvider:
    """Serve recorded stylizations; unknown requests are a hard miss."""

    def __init__(self, store: ImageStore):
        self.store = store

    def stylize(self, image: bytes, prompt: str, strength: float, seed: int | None) -> bytes:
        fingerprint = igm_fingerprint(image, prompt, strength, seed)
        png = self.store.get(fingerprint)
        if png is None:
            raise CassetteMiss(fingerprint, f"igm: {prompt[:80]}")
        return png


class RecordingIgmProvider:
    """Pass through to an inner provider, recording every result."""

    def __init__(self, inner: IgmProvider, store: ImageStore):
        self.inner = inner
        self.store = store

    def stylize(self, image: bytes, prompt: str, strength: float, seed: int | None) -> bytes:
        png = self.inner.stylize(image, prompt, strength, seed)
        self.store.put(igm_fingerprint(image, prompt, strength, seed), png)
        return png


def stylize(
    request: IgmRequest,
    provider: IgmProvider | None,
    post_process: Callable[[bytes], bytes] | None = None,
) -> bytes:
    """Run one stylization through the port and verify its contract.

    The provider must preserve pixel dimensions; a mismatch is reported as a
    provider fault. post_process is an identity-default hook for callers who
    do their own raster cleanup.
    """
    if provider is None:
        raise ProviderUnavailable("no image generation provider configured")
    result = provider.stylize(
        request.base_image, request.style_prompt, request.strength, request.seed
    )
    want = image_size(request.base_image)
    got = image_size(result)
    if got != want:
        raise ProviderUnavailable(
            f"image provider returned {got[0]}x{got[1]}, expected {want[0]}x{want[1]}"
        )
    if post_process is not None:
        result = post_process(result)
    return result
