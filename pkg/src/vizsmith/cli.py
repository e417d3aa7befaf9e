"""Command line interface mirroring the HTTP API's JSON documents.

Every subcommand prints (or writes with --out) the same JSON shape the
corresponding service endpoint returns, so scripts can swap between the two
transports. Failures exit with a class-specific code:

  2  usage errors (bad flags, missing arguments)
  3  dataset errors (unreadable, malformed, unknown field)
  4  configuration errors (unknown grammar/style/policy, bad values)
  5  provider errors (unavailable, cassette miss, unparseable replies)
  6  generation errors (no viable candidate, all goals rejected)
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from vizsmith.bench import corpus_datasets
from vizsmith.bench.report import REPORT_FORMATS, emit_report
from vizsmith.bench.runner import BenchmarkConfig, run_benchmark
from vizsmith.errors import (
    AllGoalsRejected,
    CassetteMiss,
    ConfigurationError,
    DivisionByZeroTotal,
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
from vizsmith.fixtures import HeuristicResponder
from vizsmith.generate.executor import CandidateProgram
from vizsmith.generate.filters import FilterPolicy
from vizsmith.generate.pipeline import generate_visualization
from vizsmith.generate.scaffolds import default_registry
from vizsmith.goals.explorer import Goal, explore_goals
from vizsmith.llm.cassette import Cassette
from vizsmith.llm.providers import HybridProvider, LiveProvider, ReplayProvider
from vizsmith.llm.types import GenerationConfig
from vizsmith.ops.evaluate import evaluate
from vizsmith.ops.explain import explain
from vizsmith.ops.recommend import recommend
from vizsmith.ops.refine import RefinementTurn, refine
from vizsmith.ops.repair import repair
from vizsmith.summarize.profile import build_base_summary
from vizsmith.summarize.summary import CONDITIONS, enrich_summary, render_summary
from vizsmith.summarize.table import ingest

EXIT_DATASET = 3
EXIT_CONFIG = 4
EXIT_PROVIDER = 5
EXIT_GENERATION = 6

_EXIT_CODES: tuple[tuple[tuple[type, ...], int], ...] = (
    ((ParseError, EmptyDataset, HeaderMissing, UnknownField, FileNotFoundError), EXIT_DATASET),
    ((UnknownGrammar, UnknownStyle, StrengthOutOfRange, ConfigurationError), EXIT_CONFIG),
    (
        (
            ProviderUnavailable,
            CassetteMiss,
            TokenBudgetExceeded,
            NoParsableJSON,
            ScoreParseFailure,
            ExplanationParseFailure,
        ),
        EXIT_PROVIDER,
    ),
    ((NoViableCandidate, AllGoalsRejected, DivisionByZeroTotal), EXIT_GENERATION),
    ((ValueError,), EXIT_CONFIG),
)


def _guarded(fn):
    @functools.wraps(fn)
    def inner(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except tuple(t for types, _ in _EXIT_CODES for t in types) as exc:
            code = next(c for types, c in _EXIT_CODES if isinstance(exc, types))
            click.echo(f"error [{type(exc).__name__}]: {exc}", err=True)
            sys.exit(code)

    return inner


def _emit(document: dict, out: str) -> None:
    text = json.dumps(document, indent=2)
    if out == "-":
        click.echo(text)
    else:
        Path(out).write_text(text + "\n", encoding="utf-8")


class _ProviderHandle:
    """Provider plus the cassette that must be saved after a hybrid run."""

    def __init__(self, provider, cassette: Cassette | None, cassette_path: str | None):
        self.provider = provider
        self._cassette = cassette
        self._path = cassette_path

    def __enter__(self):
        return self.provider

    def __exit__(self, *exc_info):
        if self._cassette is not None and self._path is not None:
            self._cassette.save(self._path)
        return False


def _build_provider(mode: str, cassette: str | None, live_url: str | None, api_key: str) -> _ProviderHandle:
    if mode == "heuristic":
        return _ProviderHandle(HeuristicResponder(), None, None)
    if mode == "live":
        if not live_url:
            raise ConfigurationError("--provider live needs --live-url (or VIZSMITH_LIVE_URL)")
        return _ProviderHandle(LiveProvider(live_url, api_key), None, None)
    if not cassette:
        raise ConfigurationError(f"--provider {mode} needs --cassette")
    if mode == "replay":
        if not Path(cassette).exists():
            raise ConfigurationError(f"cassette not found: {cassette}")
        return _ProviderHandle(ReplayProvider(Cassette.load(cassette)), None, None)
    if mode == "hybrid":
        tape = Cassette.load(cassette) if Path(cassette).exists() else Cassette()
        live = LiveProvider(live_url, api_key) if live_url else HeuristicResponder()
        return _ProviderHandle(HybridProvider(tape, live), tape, cassette)
    raise ConfigurationError(f"unknown provider mode {mode!r}")


def provider_options(fn):
    fn = click.option(
        "--provider",
        "provider_mode",
        type=click.Choice(["heuristic", "live", "replay", "hybrid"]),
        default="heuristic",
        show_default=True,
        help="heuristic: offline rules; live: HTTP model; replay: cassette only; "
        "hybrid: replay, recording misses from the live side",
    )(fn)
    fn = click.option("--cassette", type=click.Path(), default=None, help="cassette JSON path")(fn)
    fn = click.option("--live-url", envvar="VIZSMITH_LIVE_URL", default=None)(fn)
    fn = click.option("--api-key", envvar="VIZSMITH_API_KEY", default="")(fn)
    return fn


def _summary_for(data: str, condition: str, provider):
    summary = build_base_summary(ingest(data))
    if condition == "enrich":
        summary = enrich_summary(summary, provider)
    return summary


def _load_program(path: str) -> tuple[Goal, CandidateProgram, str, str]:
    """Goal, candidate, grammar id, and condition from a saved viz document."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    goal = Goal(**doc["goal"])
    candidate = CandidateProgram(**doc["candidate"])
    return goal, candidate, doc["scaffold_id"], doc["condition"]


@click.group()
def cli():
    """LLM-orchestrated visualization pipeline."""


@cli.command()
@click.option("--data", required=True, type=click.Path(exists=True))
@click.option("--condition", type=click.Choice(list(CONDITIONS)), default="enrich", show_default=True)
@click.option("--out", default="-", show_default=True)
@provider_options
@_guarded
def summarize(data, condition, out, provider_mode, cassette, live_url, api_key):
    """Profile a dataset; under --condition enrich, add model annotations."""
    with _build_provider(provider_mode, cassette, live_url, api_key) as provider:
        summary = _summary_for(data, condition, provider)
    _emit(
        {
            "condition": condition,
            "summary": summary.to_dict(),
            "rendered": render_summary(summary, condition),
        },
        out,
    )


@cli.command()
@click.option("--data", required=True, type=click.Path(exists=True))
@click.option("--condition", type=click.Choice(list(CONDITIONS)), default="enrich", show_default=True)
@click.option("--n", "n_goals", default=5, show_default=True)
@click.option("--out", default="-", show_default=True)
@provider_options
@_guarded
def goals(data, condition, n_goals, out, provider_mode, cassette, live_url, api_key):
    """Propose visualization goals for a dataset."""
    with _build_provider(provider_mode, cassette, live_url, api_key) as provider:
        summary = _summary_for(data, condition, provider)
        proposed = explore_goals(summary, condition, n_goals, provider)
    _emit({"goals": [g.to_dict() for g in proposed]}, out)


@cli.command()
@click.option("--data", required=True, type=click.Path(exists=True))
@click.option("--goal-index", type=int, default=None)
@click.option("--nl-goal", default=None, help="free-form goal text instead of --goal-index")
@click.option("--grammar", default="matplotlib", show_default=True)
@click.option("--condition", type=click.Choice(list(CONDITIONS)), default="enrich", show_default=True)
@click.option("--policy", default="compile_discard", show_default=True)
@click.option("--n", "n_candidates", default=1, show_default=True)
@click.option("--temperature", type=float, default=None)
@click.option("--goals-n", default=5, show_default=True, help="goals generated before --goal-index selects one")
@click.option("--out", default="-", show_default=True)
@provider_options
@_guarded
def viz(data, goal_index, nl_goal, grammar, condition, policy, n_candidates,
        temperature, goals_n, out, provider_mode, cassette, live_url, api_key):
    """Generate, execute, and filter one visualization program."""
    if (goal_index is None) == (nl_goal is None):
        raise click.UsageError("provide exactly one of --goal-index or --nl-goal")
    with _build_provider(provider_mode, cassette, live_url, api_key) as provider:
        summary = _summary_for(data, condition, provider)
        if nl_goal is not None:
            goal = Goal(index=0, question=nl_goal, visualization=nl_goal, rationale="user-provided")
        else:
            proposed = explore_goals(summary, condition, goals_n, provider)
            if not 0 <= goal_index < len(proposed):
                raise ConfigurationError(
                    f"--goal-index {goal_index} out of range; {len(proposed)} goals generated"
                )
            goal = proposed[goal_index]
        filter_policy = FilterPolicy(kind=policy, n_candidates=n_candidates)
        config = GenerationConfig(
            temperature=0.0 if temperature is None else temperature,
            n_candidates=n_candidates,
        )
        candidate = generate_visualization(
            summary, condition, goal, grammar, filter_policy, provider,
            config=config, dataset_path=str(Path(data).resolve()),
        )
    document = {
        "candidate": candidate.to_dict(),
        "goal": goal.to_dict(),
        "scaffold_id": grammar,
        "condition": condition,
        "summary_text": render_summary(summary, condition),
    }
    _emit(document, out)
    if out != "-":
        click.echo(candidate.artifact or candidate.status)


@cli.group()
def ops():
    """Operate on a saved visualization document (viz --out FILE)."""


def _ops_common(fn):
    fn = click.option("--program", required=True, type=click.Path(exists=True),
                      help="JSON document written by `viz --out`")(fn)
    fn = click.option("--data", required=True, type=click.Path(exists=True))(fn)
    fn = click.option("--out", default="-", show_default=True)(fn)
    fn = provider_options(fn)
    return fn


@ops.command("refine")
@_ops_common
@click.option("--instruction", required=True)
@_guarded
def refine_cmd(program, data, out, instruction, provider_mode, cassette, live_url, api_key):
    """Apply one natural-language refinement to a saved program."""
    goal, candidate, grammar_id, condition = _load_program(program)
    scaffold = default_registry().get(grammar_id)
    with _build_provider(provider_mode, cassette, live_url, api_key) as provider:
        summary = _summary_for(data, condition, provider)
        try:
            turn = refine(
                summary, condition, goal, candidate, instruction, scaffold,
                provider, dataset_path=str(Path(data).resolve()),
            )
            current = turn.candidate
        except NoViableCandidate as exc:
            if not exc.candidates:
                raise
            failed = exc.candidates[0]
            turn = RefinementTurn(
                instruction=instruction, before_stub=candidate.stub,
                after_stub=failed.stub, candidate=failed,
            )
            current = candidate
    _emit({"turn": turn.to_dict(), "candidate": current.to_dict()}, out)


@ops.command("evaluate")
@_ops_common
@_guarded
def evaluate_cmd(program, data, out, provider_mode, cassette, live_url, api_key):
    """Score a saved program on the six quality dimensions."""
    goal, candidate, _, _ = _load_program(program)
    with _build_provider(provider_mode, cassette, live_url, api_key) as provider:
        report = evaluate(candidate.assembled_code, goal, provider)
    _emit({"evaluation": report.to_dict()}, out)


@ops.command("explain")
@_ops_common
@_guarded
def explain_cmd(program, data, out, provider_mode, cassette, live_url, api_key):
    """Produce walkthrough and accessibility sections for a saved program."""
    goal, candidate, _, _ = _load_program(program)
    with _build_provider(provider_mode, cassette, live_url, api_key) as provider:
        explanation = explain(candidate.assembled_code, goal, provider)
    _emit({"explanation": explanation.to_dict()}, out)


@ops.command("repair")
@_ops_common
@click.option("--max-depth", default=2, show_default=True)
@_guarded
def repair_cmd(program, data, out, max_depth, provider_mode, cassette, live_url, api_key):
    """Regenerate a saved program against its execution or score critiques."""
    goal, candidate, grammar_id, condition = _load_program(program)
    scaffold = default_registry().get(grammar_id)
    with _build_provider(provider_mode, cassette, live_url, api_key) as provider:
        summary = _summary_for(data, condition, provider)
        report = None
        if candidate.status == "compiled_ok":
            report = evaluate(candidate.assembled_code, goal, provider)
        result = repair(
            summary, condition, goal, candidate, scaffold, provider,
            report=report, max_depth=max_depth,
            dataset_path=str(Path(data).resolve()),
        )
    _emit(
        {
            "candidate": result.candidate.to_dict(),
            "n_attempts": result.n_attempts,
            "critiques": list(result.critiques),
        },
        out,
    )


@ops.command("recommend")
@_ops_common
@click.option("--k", default=3, show_default=True)
@_guarded
def recommend_cmd(program, data, out, k, provider_mode, cassette, live_url, api_key):
    """Recommend follow-up goals given a saved program's goal as context."""
    goal, _, _, condition = _load_program(program)
    with _build_provider(provider_mode, cassette, live_url, api_key) as provider:
        summary = _summary_for(data, condition, provider)
        goals_out = recommend(summary, condition, (goal,), k, provider)
    _emit({"goals": [g.to_dict() for g in goals_out]}, out)


@cli.command()
@click.option("--data", "datasets", multiple=True, type=click.Path(exists=True),
              help="dataset path; repeatable. Defaults to the bundled corpus.")
@click.option("--grammar", "grammars", multiple=True, default=("chart-json",), show_default=True)
@click.option("--condition", "conditions", multiple=True,
              default=tuple(CONDITIONS), show_default=True)
@click.option("--goals-per-dataset", default=5, show_default=True)
@click.option("--viz-per-goal", default=1, show_default=True)
@click.option("--evaluate-sevq", is_flag=True, default=False)
@click.option("--format", "fmt", type=click.Choice(list(REPORT_FORMATS)), default="json",
              show_default=True)
@click.option("--out", default="-", show_default=True)
@provider_options
@_guarded
def benchmark(datasets, grammars, conditions, goals_per_dataset, viz_per_goal,
              evaluate_sevq, fmt, out, provider_mode, cassette, live_url, api_key):
    """Sweep datasets x grammars x conditions and report error rates."""
    paths = tuple(datasets) or tuple(str(p) for p in corpus_datasets())
    config = BenchmarkConfig(
        datasets=paths,
        grammars=tuple(grammars),
        conditions=tuple(conditions),
        n_goals_per_dataset=goals_per_dataset,
        visualizations_per_goal=viz_per_goal,
        evaluate_sevq=evaluate_sevq,
    )
    with _build_provider(provider_mode, cassette, live_url, api_key) as provider:
        report = run_benchmark(config, provider)
    rendered = emit_report(report, fmt)
    if out == "-":
        click.echo(rendered)
    else:
        Path(out).write_text(rendered, encoding="utf-8")


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8080, show_default=True)
@click.option("--frontend", type=click.Path(), default=None,
              help="directory of built web client assets to serve at /app")
@click.option("--igm", type=click.Choice(["none", "identity", "invert"]), default="none",
              show_default=True, help="image stylization backend")
@provider_options
@_guarded
def serve(host, port, frontend, igm, provider_mode, cassette, live_url, api_key):
    """Run the HTTP + WebSocket service."""
    import uvicorn

    from vizsmith.infographic.providers import IdentityIgmProvider, InvertIgmProvider
    from vizsmith.service import ServiceSettings, create_app

    handle = _build_provider(provider_mode, cassette, live_url, api_key)
    igm_provider = {
        "none": None,
        "identity": IdentityIgmProvider(),
        "invert": InvertIgmProvider(),
    }[igm]
    app = create_app(
        provider=handle.provider,
        igm_provider=igm_provider,
        settings=ServiceSettings(frontend_dir=frontend),
    )
    uvicorn.run(app, host=host, port=port)


def main():
    cli(prog_name="vizsmith")


if __name__ == "__main__":
    main()
