"""REST + WebSocket service exposing the visualization pipeline.

One session per uploaded dataset. Upload runs summarize + goal exploration
atomically; per-visualization operations (refine, explain, evaluate, repair,
recommend, infographic) hang off the session. Provider failures surface as
502 with the provider error class; user mistakes are 422/404; concurrent
mutations on one session are refused with 409 instead of queueing.
"""

from __future__ import annotations

import asyncio
import secrets
import tempfile
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, File, Form, HTTPException, UploadFile, WebSocket
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel
from starlette.websockets import WebSocketDisconnect

from vizsmith.errors import (
    AllGoalsRejected,
    CassetteMiss,
    EmptyDataset,
    ExplanationParseFailure,
    HeaderMissing,
    NoParsableJSON,
    NoViableCandidate,
    ParseError,
    ProviderUnavailable,
    ScoreParseFailure,
    StrengthOutOfRange,
    TokenBudgetExceeded,
    UnknownField,
    UnknownGrammar,
    UnknownStyle,
)
from vizsmith.generate.executor import ExecutionLimits
from vizsmith.generate.filters import FilterPolicy
from vizsmith.generate.pipeline import generate_visualization
from vizsmith.generate.scaffolds import default_registry
from vizsmith.goals.explorer import Goal, explore_goals
from vizsmith.infographic.providers import IgmProvider, stylize
from vizsmith.infographic.request import DEFAULT_STRENGTH, compose_request
from vizsmith.infographic.styles import StyleLibrary, default_library
from vizsmith.llm.types import GenerationConfig
from vizsmith.ops.evaluate import evaluate as evaluate_code
from vizsmith.ops.explain import explain as explain_code
from vizsmith.ops.recommend import recommend as recommend_goals
from vizsmith.ops.refine import RefinementTurn, refine as refine_code
from vizsmith.ops.repair import repair as repair_code
from vizsmith.service.sessions import Session, SessionStore, Visualization
from vizsmith.summarize.profile import build_base_summary
from vizsmith.summarize.summary import (
    CONDITIONS,
    apply_user_refinement,
    enrich_summary,
    render_summary,
)
from vizsmith.summarize.table import ingest

VALIDATION_ERRORS = (
    ParseError,
    EmptyDataset,
    HeaderMissing,
    UnknownField,
    UnknownGrammar,
    UnknownStyle,
    StrengthOutOfRange,
)

PROVIDER_ERRORS = (
    ProviderUnavailable,
    CassetteMiss,
    TokenBudgetExceeded,
    NoParsableJSON,
    AllGoalsRejected,
    ScoreParseFailure,
    ExplanationParseFailure,
    NoViableCandidate,
)


@dataclass
class ServiceSettings:
    storage_dir: str | None = None
    upload_cap_bytes: int = 20 * 1024 * 1024
    session_ttl_s: float = 3600.0
    default_condition: str = "enrich"
    default_n_goals: int = 5
    default_grammar: str = "matplotlib"
    execution: ExecutionLimits = field(default_factory=ExecutionLimits)
    frontend_dir: str | None = None
    clock: object = time.monotonic


class VisualizeBody(BaseModel):
    goal_index: int | None = None
    nl_goal: str | None = None
    grammar_id: str | None = None
    condition: str | None = None
    policy: str = "compile_discard"
    n_candidates: int = 1
    temperature: float | None = None


class SummaryRefineBody(BaseModel):
    description: str | None = None
    fields: dict[str, dict] = {}


class RefineBody(BaseModel):
    instruction: str


class RepairBody(BaseModel):
    max_depth: int = 2


class RecommendBody(BaseModel):
    k: int = 3


class InfographicBody(BaseModel):
    style_ids: list[str] = []
    custom_prompt: str | None = None
    strength: float = DEFAULT_STRENGTH
    seed: int | None = None


def _fail(status: int, exc: Exception) -> HTTPException:
    return HTTPException(
        status_code=status,
        detail={"error_class": type(exc).__name__, "detail": str(exc)},
    )


def _validation(detail: str) -> HTTPException:
    return HTTPException(
        status_code=422, detail={"error_class": "ValidationError", "detail": detail}
    )


def create_app(
    provider=None,
    igm_provider: IgmProvider | None = None,
    settings: ServiceSettings | None = None,
    style_library: StyleLibrary | None = None,
) -> FastAPI:
    cfg = settings or ServiceSettings()
    storage = Path(cfg.storage_dir or tempfile.mkdtemp(prefix="vizsmith-")).resolve()
    storage.mkdir(parents=True, exist_ok=True)
    store = SessionStore(ttl_s=cfg.session_ttl_s, clock=cfg.clock)
    registry = default_registry()
    styles = style_library if style_library is not None else default_library()

    app = FastAPI(title="vizsmith", version="0.1.0")
    app.state.store = store
    app.state.settings = cfg
    app.state.provider = provider
    app.state.igm_provider = igm_provider

    def need_provider():
        if provider is None:
            raise _fail(502, ProviderUnavailable("no text provider configured"))
        return provider

    def need_session(session_id: str) -> Session:
        session = store.get(session_id)
        if session is None:
            raise HTTPException(
                status_code=404,
                detail={"error_class": "UnknownSession", "detail": session_id},
            )
        return session

    def need_viz(session: Session, index: int) -> Visualization:
        if not 0 <= index < len(session.visualizations):
            raise HTTPException(
                status_code=404,
                detail={"error_class": "UnknownVisualization", "detail": str(index)},
            )
        return session.visualizations[index]

    @contextmanager
    def mutation(session: Session):
        if not session.lock.acquire(blocking=False):
            raise HTTPException(
                status_code=409,
                detail={
                    "error_class": "ConcurrentMutation",
                    "detail": "another mutation is in progress on this session",
                },
            )
        try:
            yield
        finally:
            session.lock.release()

    def run_provider_step(fn):
        """Run a provider-backed step, mapping failures to HTTP errors."""
        try:
            return fn()
        except VALIDATION_ERRORS as exc:
            raise _fail(422, exc) from exc
        except PROVIDER_ERRORS as exc:
            raise _fail(502, exc) from exc

    # --- dataset upload ---------------------------------------------------

    @app.post("/datasets")
    def upload_dataset(
        file: UploadFile = File(...),
        condition: str = Form(None),
        n_goals: int = Form(None),
    ):
        active_condition = condition or cfg.default_condition
        if active_condition not in CONDITIONS:
            raise _validation(f"unknown summary condition {active_condition!r}")
        goal_count = n_goals or cfg.default_n_goals
        if goal_count < 1:
            raise _validation("n_goals must be positive")
        raw = file.file.read(cfg.upload_cap_bytes + 1)
        if len(raw) > cfg.upload_cap_bytes:
            raise _validation(
                f"upload exceeds the {cfg.upload_cap_bytes} byte cap"
            )
        if not raw:
            raise _validation("empty upload")
        name = Path(file.filename or "dataset.csv").name
        if Path(name).suffix.lower() not in (".csv", ".json"):
            raise _validation(f"unsupported dataset extension on {name!r}")
        session_dir = storage / f"pending-{secrets.token_hex(6)}"
        session_dir.mkdir(parents=True)
        dataset_path = session_dir / name
        dataset_path.write_bytes(raw)

        events: list[dict] = []
        try:
            events.append({"stage": "summarize", "status": "started", "payload": {}})
            try:
                summary = build_base_summary(ingest(str(dataset_path)))
            except VALIDATION_ERRORS as exc:
                raise _fail(422, exc) from exc
            except ValueError as exc:
                raise _validation(str(exc)) from exc
            if active_condition == "enrich":
                summary = run_provider_step(
                    lambda: enrich_summary(summary, need_provider())
                )
            events.append(
                {
                    "stage": "summarize",
                    "status": "done",
                    "payload": {"n_fields": len(summary.fields)},
                }
            )
            events.append({"stage": "goals", "status": "started", "payload": {}})
            goals = run_provider_step(
                lambda: explore_goals(
                    summary, active_condition, goal_count, need_provider()
                )
            )
            events.append(
                {"stage": "goals", "status": "done", "payload": {"n_goals": len(goals)}}
            )
        except HTTPException:
            # atomic upload: no session is created unless every stage passed
            dataset_path.unlink(missing_ok=True)
            raise
        session = store.create(
            dataset_path=str(dataset_path),
            dataset_name=summary.name,
            condition=active_condition,
            summary=summary,
            goals=goals,
            events=events,
        )
        return {
            "session_id": session.id,
            "condition": active_condition,
            "summary": session.summary.to_dict(),
            "goals": [g.to_dict() for g in session.goals],
        }

    # --- session state ------------------------------------------------------

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return need_session(session_id).overview()

    @app.get("/sessions/{session_id}/events")
    def get_events(session_id: str):
        return {"events": need_session(session_id).events}

    @app.post("/sessions/{session_id}/snapshot")
    def snapshot_session(session_id: str):
        session = need_session(session_id)
        path = session.snapshot(storage)
        return {"path": str(path)}

    @app.post("/sessions/{session_id}/summary/refine")
    def refine_summary(session_id: str, body: SummaryRefineBody):
        session = need_session(session_id)
        with mutation(session):
            edits: dict = {}
            if body.description is not None:
                edits["description"] = body.description
            if body.fields:
                edits["fields"] = body.fields
            try:
                session.summary = apply_user_refinement(session.summary, edits)
            except UnknownField as exc:
                raise _fail(422, exc) from exc
            session.emit("summarize", "refined", {"edits": sorted(edits)})
            return {"summary": session.summary.to_dict()}

    # --- visualization generation ---------------------------------------------

    @app.post("/sessions/{session_id}/visualize")
    def visualize(session_id: str, body: VisualizeBody):
        session = need_session(session_id)
        with mutation(session):
            if (body.goal_index is None) == (body.nl_goal is None):
                raise _validation("provide exactly one of goal_index or nl_goal")
            if body.nl_goal is not None:
                if not body.nl_goal.strip():
                    raise _validation("nl_goal must be non-empty")
                goal = Goal(
                    index=len(session.goals),
                    question=body.nl_goal.strip(),
                    visualization=body.nl_goal.strip(),
                    rationale="user-provided",
                )
                session.goals.append(goal)
            else:
                if not 0 <= body.goal_index < len(session.goals):
                    raise HTTPException(
                        status_code=404,
                        detail={
                            "error_class": "UnknownGoal",
                            "detail": str(body.goal_index),
                        },
                    )
                goal = session.goals[body.goal_index]
            condition = body.condition or session.condition
            if condition not in CONDITIONS:
                raise _validation(f"unknown summary condition {condition!r}")
            grammar_id = body.grammar_id or cfg.default_grammar
            try:
                scaffold = registry.get(grammar_id)
            except UnknownGrammar as exc:
                raise _fail(422, exc) from exc
            try:
                policy = FilterPolicy(kind=body.policy, n_candidates=body.n_candidates)
            except ValueError as exc:
                raise _validation(str(exc)) from exc
            gen_config = GenerationConfig(
                temperature=0.0 if body.temperature is None else body.temperature,
                n_candidates=body.n_candidates,
            )
            session.emit(
                "generate", "started",
                {"goal_index": goal.index, "grammar_id": grammar_id},
            )
            try:
                candidate = run_provider_step(
                    lambda: generate_visualization(
                        session.summary, condition, goal, grammar_id, policy,
                        need_provider(), config=gen_config, limits=cfg.execution,
                        dataset_path=session.dataset_path, registry=registry,
                        work_root=str(storage),
                    )
                )
            except HTTPException as exc:
                detail = exc.detail if isinstance(exc.detail, dict) else {}
                if exc.status_code == 502 and detail.get("error_class") == "NoViableCandidate":
                    session.emit("filter", "failed", {"detail": detail.get("detail", "")})
                raise
            session.emit("generate", "done", {"n_candidates": body.n_candidates})
            session.emit("execute", "done", {"status": candidate.status})
            session.emit("filter", "done", {"policy": body.policy})
            viz = Visualization(
                index=len(session.visualizations),
                goal=goal,
                grammar_id=grammar_id,
                condition=condition,
                candidate=candidate,
            )
            session.visualizations.append(viz)
            return {
                "index": viz.index,
                "candidate": candidate.to_dict(),
                "goal": goal.to_dict(),
                "scaffold_id": scaffold.grammar_id,
                "condition": condition,
                "summary_text": render_summary(session.summary, condition),
            }

    @app.get("/sessions/{session_id}/visualizations/{index}/artifact")
    def get_artifact(session_id: str, index: int):
        viz = need_viz(need_session(session_id), index)
        if viz.candidate.artifact is None:
            raise HTTPException(
                status_code=404,
                detail={"error_class": "NoArtifact", "detail": viz.candidate.status},
            )
        path = Path(viz.candidate.artifact)
        media = "image/png" if path.suffix == ".png" else "application/json"
        return FileResponse(path, media_type=media)

    # --- post-generation operations ---------------------------------------------

    @app.post("/sessions/{session_id}/visualizations/{index}/refine")
    def refine_visualization(session_id: str, index: int, body: RefineBody):
        session = need_session(session_id)
        viz = need_viz(session, index)
        with mutation(session):
            if not body.instruction.strip():
                raise _validation("instruction must be non-empty")
            scaffold = registry.get(viz.grammar_id)
            try:
                turn = refine_code(
                    session.summary, viz.condition, viz.goal, viz.candidate,
                    body.instruction, scaffold, need_provider(),
                    limits=cfg.execution, history=tuple(viz.turns),
                    dataset_path=session.dataset_path, work_root=str(storage),
                )
            except NoViableCandidate as exc:
                if not exc.candidates:
                    raise _fail(502, exc) from exc
                failed = exc.candidates[0]
                turn = RefinementTurn(
                    instruction=body.instruction,
                    before_stub=viz.candidate.stub,
                    after_stub=failed.stub,
                    candidate=failed,
                )
                viz.turns.append(turn)
                session.emit(
                    "refine", "failed",
                    {"viz_index": index, "status": failed.status},
                )
                return {"turn": turn.to_dict(), "candidate": viz.candidate.to_dict()}
            except PROVIDER_ERRORS as exc:
                raise _fail(502, exc) from exc
            viz.turns.append(turn)
            viz.candidate = turn.candidate
            viz.evaluation = None
            session.emit("refine", "done", {"viz_index": index})
            return {"turn": turn.to_dict(), "candidate": viz.candidate.to_dict()}

    @app.post("/sessions/{session_id}/visualizations/{index}/evaluate")
    def evaluate_visualization(session_id: str, index: int):
        session = need_session(session_id)
        viz = need_viz(session, index)
        with mutation(session):
            report = run_provider_step(
                lambda: evaluate_code(
                    viz.candidate.assembled_code, viz.goal, need_provider()
                )
            )
            viz.evaluation = report
            session.emit(
                "evaluate", "done", {"viz_index": index, "sevq": report.sevq}
            )
            return {"evaluation": report.to_dict()}

    @app.post("/sessions/{session_id}/visualizations/{index}/explain")
    def explain_visualization(session_id: str, index: int):
        session = need_session(session_id)
        viz = need_viz(session, index)
        explanation = run_provider_step(
            lambda: explain_code(viz.candidate.assembled_code, viz.goal, need_provider())
        )
        session.emit("explain", "done", {"viz_index": index})
        return {"explanation": explanation.to_dict()}

    @app.post("/sessions/{session_id}/visualizations/{index}/repair")
    def repair_visualization(session_id: str, index: int, body: RepairBody):
        session = need_session(session_id)
        viz = need_viz(session, index)
        with mutation(session):
            if body.max_depth < 0:
                raise _validation("max_depth must be >= 0")
            scaffold = registry.get(viz.grammar_id)
            try:
                result = repair_code(
                    session.summary, viz.condition, viz.goal, viz.candidate,
                    scaffold, need_provider(), report=viz.evaluation,
                    limits=cfg.execution, max_depth=body.max_depth,
                    dataset_path=session.dataset_path, work_root=str(storage),
                )
            except ValueError as exc:
                raise _validation(str(exc)) from exc
            except PROVIDER_ERRORS as exc:
                raise _fail(502, exc) from exc
            viz.candidate = result.candidate
            viz.evaluation = None
            session.emit(
                "repair", "done",
                {"viz_index": index, "n_attempts": result.n_attempts},
            )
            return {
                "candidate": result.candidate.to_dict(),
                "n_attempts": result.n_attempts,
                "critiques": list(result.critiques),
            }

    @app.post("/sessions/{session_id}/visualizations/{index}/recommend")
    def recommend_more(session_id: str, index: int, body: RecommendBody):
        session = need_session(session_id)
        need_viz(session, index)
        with mutation(session):
            if body.k < 1:
                raise _validation("k must be positive")
            goals = run_provider_step(
                lambda: recommend_goals(
                    session.summary, session.condition, tuple(session.goals),
                    body.k, need_provider(),
                )
            )
            session.goals.extend(goals)
            session.emit("goals", "recommended", {"n_goals": len(goals)})
            return {"goals": [g.to_dict() for g in goals]}

    @app.post("/sessions/{session_id}/visualizations/{index}/infographic")
    def make_infographic(session_id: str, index: int, body: InfographicBody):
        session = need_session(session_id)
        viz = need_viz(session, index)
        with mutation(session):
            artifact = viz.candidate.artifact
            if viz.candidate.status != "compiled_ok" or artifact is None:
                raise _validation("visualization has no executable artifact")
            if not artifact.endswith(".png"):
                raise _validation(
                    "infographics need a raster artifact; this grammar produced "
                    + Path(artifact).suffix
                )
            base_image = Path(artifact).read_bytes()
            try:
                request = compose_request(
                    base_image, body.style_ids, body.custom_prompt,
                    strength=body.strength, seed=body.seed, library=styles,
                )
            except (UnknownStyle, StrengthOutOfRange) as exc:
                raise _fail(422, exc) from exc
            except ValueError as exc:
                raise _validation(str(exc)) from exc
            png = run_provider_step(lambda: stylize(request, igm_provider))
            out = Path(session.dataset_path).parent / (
                f"infographic-{index}-{len(viz.infographics)}.png"
            )
            out.write_bytes(png)
            viz.infographics.append(str(out))
            viz.infographic_meta.append(request.to_dict())
            m = len(viz.infographics) - 1
            session.emit(
                "infographic", "done", {"viz_index": index, "infographic_index": m}
            )
            return {
                "index": m,
                "url": f"/sessions/{session_id}/visualizations/{index}/infographics/{m}",
                "request": request.to_dict(),
            }

    @app.get("/sessions/{session_id}/visualizations/{index}/infographics/{m}")
    def get_infographic(session_id: str, index: int, m: int):
        viz = need_viz(need_session(session_id), index)
        if not 0 <= m < len(viz.infographics):
            raise HTTPException(
                status_code=404,
                detail={"error_class": "UnknownInfographic", "detail": str(m)},
            )
        return FileResponse(viz.infographics[m], media_type="image/png")

    # --- progress socket ----------------------------------------------------------

    @app.websocket("/sessions/{session_id}/events")
    async def events_socket(websocket: WebSocket, session_id: str):
        session = store.get(session_id)
        await websocket.accept()
        if session is None:
            await websocket.close(code=1008)
            return
        sent = 0
        try:
            while True:
                buffered = list(session.events)
                while sent < len(buffered):
                    await websocket.send_json(buffered[sent])
                    sent += 1
                try:
                    # doubles as the disconnect probe: close surfaces here
                    await asyncio.wait_for(websocket.receive_text(), timeout=0.05)
                except asyncio.TimeoutError:
                    continue
        except WebSocketDisconnect:
            return

    # --- styles -----------------------------------------------------------------

    @app.get("/styles")
    def list_styles():
        return {"styles": styles.to_list()}

    if cfg.frontend_dir and Path(cfg.frontend_dir).is_dir():
        app.mount("/app", StaticFiles(directory=cfg.frontend_dir, html=True), name="app")

    return app
