"""Scaffold library: grammar-specific code frames with one stub hole.

A scaffold splits a runnable program (or a validatable document) into a
preamble, a stub marker, and a postamble. Generation only ever fills the
marker, so imports, dataset loading, and artifact saving stay fixed. The
bundled registry covers one declarative JSON grammar validated against its
schema and two python plotting grammars executed in a sandboxed child
process.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from vizsmith.errors import UnknownGrammar

EXECUTION_MODES = ("subprocess", "declarative_validation")


@dataclass(frozen=True)
class Scaffold:
    grammar_id: str
    language_id: str
    preamble: str
    stub_marker: str
    postamble: str
    execution_mode: str
    selftest_stub: str = ""

    def __post_init__(self) -> None:
        if self.execution_mode not in EXECUTION_MODES:
            raise ValueError(f"unknown execution mode {self.execution_mode!r}")
        if not self.stub_marker:
            raise ValueError("stub_marker must be non-empty")
        if self.template().count(self.stub_marker) != 1:
            raise ValueError("stub_marker must occur exactly once in the scaffold")

    def template(self) -> str:
        return self.preamble + self.stub_marker + self.postamble


class ScaffoldRegistry:
    """Immutable-after-load mapping from grammar id to scaffold."""

    def __init__(self, scaffolds: list[Scaffold] | None = None):
        self._by_id: dict[str, Scaffold] = {}
        for scaffold in scaffolds or []:
            self.register(scaffold)

    def register(self, scaffold: Scaffold) -> None:
        if scaffold.grammar_id in self._by_id:
            raise ValueError(f"grammar {scaffold.grammar_id!r} registered twice")
        self._by_id[scaffold.grammar_id] = scaffold

    def get(self, grammar_id: str) -> Scaffold:
        try:
            return self._by_id[grammar_id]
        except KeyError:
            known = ", ".join(sorted(self._by_id))
            raise UnknownGrammar(f"no scaffold for grammar {grammar_id!r} (known: {known})") from None

    def ids(self) -> list[str]:
        return sorted(self._by_id)

    @classmethod
    def load(cls, registry_path: str | Path) -> "ScaffoldRegistry":
        registry_path = Path(registry_path)
        entries = json.loads(registry_path.read_text(encoding="utf-8"))
        scaffolds = []
        for entry in entries:
            parts = json.loads((registry_path.parent / entry["scaffold"]).read_text(encoding="utf-8"))
            scaffolds.append(
                Scaffold(
                    grammar_id=entry["grammar_id"],
                    language_id=entry["language_id"],
                    preamble=parts["preamble"],
                    stub_marker=parts["stub_marker"],
                    postamble=parts["postamble"],
                    execution_mode=entry["execution_mode"],
                    selftest_stub=parts.get("selftest_stub", ""),
                )
            )
        return cls(scaffolds)


_default_registry: ScaffoldRegistry | None = None


def default_registry() -> ScaffoldRegistry:
    global _default_registry
    if _default_registry is None:
        path = resources.files("vizsmith.generate").joinpath("scaffolds/registry.json")
        _default_registry = ScaffoldRegistry.load(str(path))
    return _default_registry


def get_scaffold(grammar_id: str, registry: ScaffoldRegistry | None = None) -> Scaffold:
    return (registry or default_registry()).get(grammar_id)


def chart_spec_schema() -> dict:
    """The bundled JSON Schema for the declarative chart grammar."""
    path = resources.files("vizsmith.generate").joinpath("schemas/chart_spec.schema.json")
    return json.loads(path.read_text(encoding="utf-8"))
