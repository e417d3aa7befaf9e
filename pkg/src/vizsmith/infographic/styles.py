"""Natural-language style library for infographic generation.

Styles are short, parsimonious prompt fragments a user can mix, edit, and
extend; the bundled set is a starting point, not a canon.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from vizsmith.errors import UnknownStyle


@dataclass(frozen=True)
class StyleEntry:
    id: str
    prompt: str
    tags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.id.strip():
            raise ValueError("style id must be non-empty")
        if not self.prompt.strip():
            raise ValueError(f"style {self.id!r} has an empty prompt")
        object.__setattr__(self, "tags", tuple(self.tags))

    def to_dict(self) -> dict:
        return {"id": self.id, "prompt": self.prompt, "tags": list(self.tags)}

    @classmethod
    def from_dict(cls, data: dict) -> "StyleEntry":
        return cls(id=data["id"], prompt=data["prompt"], tags=tuple(data.get("tags", ())))


@dataclass
class StyleLibrary:
    entries: dict[str, StyleEntry] = field(default_factory=dict)

    def add(self, entry: StyleEntry) -> None:
        if entry.id in self.entries:
            raise ValueError(f"duplicate style id {entry.id!r}")
        self.entries[entry.id] = entry

    def replace(self, entry: StyleEntry) -> None:
        """User edit: overwrite or insert an entry."""
        self.entries[entry.id] = entry

    def remove(self, style_id: str) -> None:
        if style_id not in self.entries:
            raise UnknownStyle(style_id)
        del self.entries[style_id]

    def get(self, style_id: str) -> StyleEntry:
        try:
            return self.entries[style_id]
        except KeyError:
            raise UnknownStyle(style_id) from None

    def ids(self) -> list[str]:
        return list(self.entries)

    def to_list(self) -> list[dict]:
        return [entry.to_dict() for entry in self.entries.values()]

    @classmethod
    def from_list(cls, data: list[dict]) -> "StyleLibrary":
        library = cls()
        for item in data:
            library.add(StyleEntry.from_dict(item))
        return library

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_list(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "StyleLibrary":
        return cls.from_list(json.loads(Path(path).read_text(encoding="utf-8")))


def default_library() -> StyleLibrary:
    """The bundled starter library, reloaded fresh on every call."""
    raw = resources.files("vizsmith.infographic").joinpath("styles.json").read_text(encoding="utf-8")
    return StyleLibrary.from_list(json.loads(raw))
