"""Recorded provider responses keyed by request fingerprint.

A cassette file is a JSON array of entries:

    {"fingerprint": "...", "request_summary": "...",
     "response": {"candidates": ["..."],
                  "usage": {"prompt_tokens": 0, "completion_tokens": 0}}}

Fingerprints are unique within a file; lookups are exact-match only.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

from vizsmith.llm.types import ProviderResponse


@dataclass
class Cassette:
    entries: dict[str, ProviderResponse] = field(default_factory=dict)
    summaries: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, fp: str) -> ProviderResponse | None:
        return self.entries.get(fp)

    def record(self, fp: str, request_summary: str, response: ProviderResponse) -> None:
        """Add one entry; re-recording the same fingerprint must agree."""
        with self._lock:
            existing = self.entries.get(fp)
            if existing is not None:
                if existing.candidates != tuple(response.candidates):
                    raise ValueError(f"conflicting recordings for fingerprint {fp}")
                return
            self.entries[fp] = response
            self.summaries[fp] = request_summary

    @classmethod
    def load(cls, path: str | Path) -> Cassette:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(raw, list):
            raise ValueError("cassette file must hold a JSON array")
        cassette = cls()
        for entry in raw:
            fp = entry["fingerprint"]
            if fp in cassette.entries:
                raise ValueError(f"duplicate fingerprint in cassette: {fp}")
            resp = entry["response"]
            cassette.entries[fp] = ProviderResponse(
                candidates=tuple(resp["candidates"]),
                usage=dict(resp.get("usage", {})),
                provider_meta={"provider": "replay"},
            )
            cassette.summaries[fp] = entry.get("request_summary", "")
        return cassette

    def save(self, path: str | Path) -> None:
        rows = []
        for fp in sorted(self.entries):
            resp = self.entries[fp]
            rows.append(
                {
                    "fingerprint": fp,
                    "request_summary": self.summaries.get(fp, ""),
                    "response": {
                        "candidates": list(resp.candidates),
                        "usage": {
                            "prompt_tokens": int(resp.usage.get("prompt_tokens", 0)),
                            "completion_tokens": int(resp.usage.get("completion_tokens", 0)),
                        },
                    },
                }
            )
        text = json.dumps(rows, indent=2, sort_keys=True, ensure_ascii=False)
        Path(path).write_text(text + "\n", encoding="utf-8")
