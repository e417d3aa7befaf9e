"""Candidate execution: sandboxed child processes or schema validation.

Subprocess grammars run as `python program.py <dataset> <artifact>` inside a
fresh working directory with a wall-clock timeout and an address-space
limit; a PNG artifact plus exit code 0 means compiled_ok. Declarative
grammars never spawn a process: the assembled document is parsed as JSON and
validated against the bundled chart schema, and validation failures are
compile errors.

Containment is working-directory isolation. Each run gets its own directory
under a disposable root, so a post-run diff of that root (tree_paths before
and after, minus the run directory) exposes any write that escaped.
"""

from __future__ import annotations

import json
import resource
import subprocess
import sys
import tempfile
import uuid
from dataclasses import dataclass, field, replace
from pathlib import Path

import jsonschema

from vizsmith.generate.scaffolds import Scaffold, chart_spec_schema

CANDIDATE_STATUSES = ("pending", "compiled_ok", "compile_error", "runtime_error", "timeout")

ERROR_STATUSES = ("compile_error", "runtime_error", "timeout")


@dataclass(frozen=True)
class ExecutionLimits:
    # 1 GiB of address space: the plotting stack peaks near 540 MiB virtual,
    # and right at the edge the allocator fails unpredictably instead of fast
    timeout_s: float = 30.0
    memory_mb: int = 1024

    def __post_init__(self) -> None:
        if self.timeout_s <= 0 or self.memory_mb <= 0:
            raise ValueError("execution limits must be positive")


@dataclass(frozen=True)
class CandidateProgram:
    goal_index: int
    scaffold_ref: str
    stub: str
    assembled_code: str
    status: str = "pending"
    error_detail: str | None = None
    artifact: str | None = None
    correctness_score: float | None = None

    def __post_init__(self) -> None:
        if self.status not in CANDIDATE_STATUSES:
            raise ValueError(f"unknown candidate status {self.status!r}")
        if (self.artifact is not None) != (self.status == "compiled_ok"):
            raise ValueError("artifact must be present exactly when status is compiled_ok")

    def to_dict(self) -> dict:
        return {
            "goal_index": self.goal_index,
            "scaffold_ref": self.scaffold_ref,
            "stub": self.stub,
            "assembled_code": self.assembled_code,
            "status": self.status,
            "error_detail": self.error_detail,
            "artifact": self.artifact,
            "correctness_score": self.correctness_score,
        }


_work_root: Path | None = None


def _default_work_root() -> Path:
    global _work_root
    if _work_root is None:
        _work_root = Path(tempfile.mkdtemp(prefix="vizsmith-runs-"))
    return _work_root


def tree_paths(root: str | Path) -> set[str]:
    """Relative paths of every file under root; the containment diff input."""
    root = Path(root)
    return {str(p.relative_to(root)) for p in root.rglob("*") if p.is_file()}


def _rlimit_preexec(memory_mb: int):
    def apply() -> None:
        limit = memory_mb * 1024 * 1024
        resource.setrlimit(resource.RLIMIT_AS, (limit, limit))

    return apply


def _run_subprocess(
    candidate: CandidateProgram, dataset_path: Path, limits: ExecutionLimits, workdir: Path
) -> CandidateProgram:
    try:
        compile(candidate.assembled_code, "<candidate>", "exec")
    except SyntaxError as exc:
        return replace(candidate, status="compile_error", error_detail=f"syntax error: {exc}")
    program = workdir / "program.py"
    program.write_text(candidate.assembled_code, encoding="utf-8")
    artifact = workdir / "artifact.png"
    env = {
        "PATH": "/usr/bin:/bin",
        "HOME": str(workdir),
        "MPLCONFIGDIR": str(workdir),
    }
    try:
        completed = subprocess.run(
            [sys.executable, str(program), str(dataset_path), str(artifact)],
            cwd=workdir,
            env=env,
            capture_output=True,
            text=True,
            timeout=limits.timeout_s,
            preexec_fn=_rlimit_preexec(limits.memory_mb),
        )
    except subprocess.TimeoutExpired:
        return replace(
            candidate, status="timeout", error_detail=f"exceeded {limits.timeout_s}s wall clock"
        )
    if completed.returncode != 0:
        detail = (completed.stderr or completed.stdout or "").strip()[-2000:]
        return replace(candidate, status="runtime_error", error_detail=detail or "nonzero exit")
    if not artifact.exists():
        return replace(candidate, status="runtime_error", error_detail="program exited 0 but wrote no artifact")
    return replace(candidate, status="compiled_ok", artifact=str(artifact), error_detail=None)


def _run_declarative(candidate: CandidateProgram, workdir: Path) -> CandidateProgram:
    try:
        spec = json.loads(candidate.assembled_code)
    except json.JSONDecodeError as exc:
        return replace(candidate, status="compile_error", error_detail=f"invalid JSON: {exc}")
    try:
        jsonschema.validate(spec, chart_spec_schema())
    except jsonschema.ValidationError as exc:
        return replace(candidate, status="compile_error", error_detail=f"schema violation: {exc.message}")
    artifact = workdir / "artifact.json"
    artifact.write_text(json.dumps(spec, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return replace(candidate, status="compiled_ok", artifact=str(artifact), error_detail=None)


def execute(
    candidate: CandidateProgram,
    scaffold: Scaffold,
    dataset_path: str | Path,
    limits: ExecutionLimits | None = None,
    work_root: str | Path | None = None,
) -> CandidateProgram:
    """Run one candidate and return it with a terminal status.

    Never raises for program failures; compile errors, runtime errors, and
    timeouts come back encoded in the status field.
    """
    if candidate.scaffold_ref != scaffold.grammar_id:
        raise ValueError(
            f"candidate was assembled for {candidate.scaffold_ref!r}, not {scaffold.grammar_id!r}"
        )
    limits = limits or ExecutionLimits()
    root = Path(work_root) if work_root is not None else _default_work_root()
    root.mkdir(parents=True, exist_ok=True)
    workdir = root / f"run-{uuid.uuid4().hex[:12]}"
    workdir.mkdir()
    if scaffold.execution_mode == "declarative_validation":
        return _run_declarative(candidate, workdir)
    return _run_subprocess(candidate, Path(dataset_path), limits, workdir)


def selftest(scaffold: Scaffold, dataset_path: str | Path, limits: ExecutionLimits | None = None) -> CandidateProgram:
    """Execute the scaffold's bundled empty-chart stub; used by tests and setup checks."""
    from vizsmith.generate.codegen import assemble

    candidate = CandidateProgram(
        goal_index=-1,
        scaffold_ref=scaffold.grammar_id,
        stub=scaffold.selftest_stub,
        assembled_code=assemble(scaffold, scaffold.selftest_stub),
    )
    return execute(candidate, scaffold, dataset_path, limits)
