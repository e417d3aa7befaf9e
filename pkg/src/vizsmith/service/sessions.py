"""In-memory session store for the HTTP service.

One session per uploaded dataset: summary, goals, visualization history, and
a buffered event log for the progress socket. Mutations are serialized by a
per-session lock; a busy lock is surfaced to callers instead of queueing.
Sessions expire after an idle TTL and can be snapshotted to JSON for
resumable demos.
"""

from __future__ import annotations

import json
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from vizsmith.generate.executor import CandidateProgram
from vizsmith.goals.explorer import Goal
from vizsmith.ops.evaluate import EvaluationReport
from vizsmith.ops.refine import RefinementTurn
from vizsmith.summarize.summary import DatasetSummary


@dataclass
class Visualization:
    """One visualization slot: current program plus its history."""

    index: int
    goal: Goal
    grammar_id: str
    condition: str
    candidate: CandidateProgram
    turns: list[RefinementTurn] = field(default_factory=list)
    evaluation: EvaluationReport | None = None
    infographics: list[str] = field(default_factory=list)
    infographic_meta: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "goal": self.goal.to_dict(),
            "grammar_id": self.grammar_id,
            "condition": self.condition,
            "candidate": self.candidate.to_dict(),
            "turns": [t.to_dict() for t in self.turns],
            "n_turns": len(self.turns),
            "evaluation": self.evaluation.to_dict() if self.evaluation else None,
            "n_infographics": len(self.infographics),
        }


@dataclass
class Session:
    id: str
    dataset_path: str
    dataset_name: str
    condition: str
    summary: DatasetSummary
    goals: list[Goal]
    visualizations: list[Visualization] = field(default_factory=list)
    events: list[dict] = field(default_factory=list)
    created_at: float = 0.0
    last_active: float = 0.0
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def emit(self, stage: str, status: str, payload: dict | None = None) -> None:
        self.events.append({"stage": stage, "status": status, "payload": payload or {}})

    def overview(self) -> dict:
        return {
            "session_id": self.id,
            "dataset_name": self.dataset_name,
            "condition": self.condition,
            "summary": self.summary.to_dict(),
            "goals": [g.to_dict() for g in self.goals],
            "n_goals": len(self.goals),
            "visualizations": [v.to_dict() for v in self.visualizations],
        }

    def snapshot(self, directory: str | Path) -> Path:
        """Persist the session state (minus locks and raw bytes) as JSON."""
        path = Path(directory) / f"session-{self.id}.json"
        doc = {
            "id": self.id,
            "dataset_path": self.dataset_path,
            "dataset_name": self.dataset_name,
            "condition": self.condition,
            "created_at": self.created_at,
            "overview": self.overview(),
            "events": self.events,
        }
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path


class SessionStore:
    """Thread-safe id -> Session map with idle expiry."""

    def __init__(self, ttl_s: float = 3600.0, clock=time.monotonic):
        self.ttl_s = ttl_s
        self._clock = clock
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(
        self,
        dataset_path: str,
        dataset_name: str,
        condition: str,
        summary: DatasetSummary,
        goals: list[Goal],
        events: list[dict] | None = None,
    ) -> Session:
        now = self._clock()
        session = Session(
            id=secrets.token_hex(8),
            dataset_path=dataset_path,
            dataset_name=dataset_name,
            condition=condition,
            summary=summary,
            goals=list(goals),
            events=list(events or []),
            created_at=now,
            last_active=now,
        )
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session | None:
        """The live session, or None when unknown or idle past the TTL."""
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None:
                return None
            if self._clock() - session.last_active > self.ttl_s:
                del self._sessions[session_id]
                return None
            session.last_active = self._clock()
            return session

    def drop(self, session_id: str) -> None:
        with self._lock:
            self._sessions.pop(session_id, None)

    def ids(self) -> list[str]:
        with self._lock:
            return list(self._sessions)
