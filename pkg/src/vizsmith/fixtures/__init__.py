"""Deterministic fixtures: rule-based and fault-injecting providers."""

from vizsmith.fixtures.faults import BROKEN_STUB, FaultInjectingProvider
from vizsmith.fixtures.responder import (
    HeuristicResponder,
    build_stub,
    matches_directive,
    nl_fallback_directive,
    plan_directives,
)

__all__ = [
    "BROKEN_STUB",
    "FaultInjectingProvider",
    "HeuristicResponder",
    "build_stub",
    "matches_directive",
    "nl_fallback_directive",
    "plan_directives",
]
