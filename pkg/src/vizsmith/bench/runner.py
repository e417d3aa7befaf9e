"""Benchmark runner: sweep datasets x conditions x grammars x goals."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from vizsmith.errors import (
    AllGoalsRejected,
    CassetteMiss,
    ConfigurationError,
    NoParsableJSON,
    NoViableCandidate,
    ProviderUnavailable,
    ScoreParseFailure,
)
from vizsmith.bench.metrics import MetricsReport, RunOutcome, build_report
from vizsmith.generate.executor import ExecutionLimits
from vizsmith.generate.filters import FilterPolicy
from vizsmith.generate.pipeline import generate_visualization
from vizsmith.generate.scaffolds import ScaffoldRegistry, default_registry
from vizsmith.goals.explorer import explore_goals
from vizsmith.llm.types import GenerationConfig
from vizsmith.ops.evaluate import evaluate
from vizsmith.summarize.profile import build_base_summary
from vizsmith.summarize.summary import CONDITIONS, enrich_summary
from vizsmith.summarize.table import ingest

DEFAULT_CONDITIONS = CONDITIONS


@dataclass(frozen=True)
class BenchmarkConfig:
    datasets: tuple[str, ...]
    grammars: tuple[str, ...] = ("chart-json",)
    conditions: tuple[str, ...] = DEFAULT_CONDITIONS
    n_goals_per_dataset: int = 5
    visualizations_per_goal: int = 1
    generation: GenerationConfig = field(
        default_factory=lambda: GenerationConfig(temperature=0.0, n_candidates=1)
    )
    single_try: bool = True
    evaluate_sevq: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "datasets", tuple(self.datasets))
        object.__setattr__(self, "grammars", tuple(self.grammars))
        object.__setattr__(self, "conditions", tuple(self.conditions))
        if not self.datasets:
            raise ConfigurationError("benchmark needs at least one dataset")
        if not self.grammars:
            raise ConfigurationError("benchmark needs at least one grammar")
        if not self.conditions:
            raise ConfigurationError("benchmark needs at least one condition")
        unknown = [c for c in self.conditions if c not in CONDITIONS]
        if unknown:
            raise ConfigurationError(f"unknown summary conditions: {unknown}")
        if self.n_goals_per_dataset < 1:
            raise ConfigurationError("n_goals_per_dataset must be positive")
        if self.visualizations_per_goal < 1:
            raise ConfigurationError("visualizations_per_goal must be positive")


_GOAL_FAILURES = (NoParsableJSON, AllGoalsRejected, ProviderUnavailable, CassetteMiss)


def run_benchmark(
    config: BenchmarkConfig,
    provider,
    *,
    registry: ScaffoldRegistry | None = None,
    limits: ExecutionLimits | None = None,
    work_root: str | None = None,
) -> MetricsReport:
    """Execute the full grid and reduce it to a metrics report.

    Per-run failures become error outcomes. A dataset/condition whose goal
    generation fails contributes zero outcomes plus a warning: the error
    rate is defined over generated visualizations only. Dataset ingestion
    problems are configuration errors and propagate.
    """
    reg = registry or default_registry()
    for grammar in config.grammars:
        reg.get(grammar)  # unknown grammars fail before any run
    n_candidates = 1 if config.single_try else config.generation.n_candidates
    policy = FilterPolicy(kind="compile_discard", n_candidates=n_candidates)
    outcomes: list[RunOutcome] = []
    warnings: list[str] = []
    dataset_ids: list[str] = []
    for dataset in config.datasets:
        dataset_id = Path(dataset).stem
        dataset_ids.append(dataset_id)
        base = build_base_summary(ingest(dataset))
        for condition in config.conditions:
            summary = base
            if condition == "enrich":
                try:
                    summary = enrich_summary(base, provider)
                except _GOAL_FAILURES as exc:
                    warnings.append(f"{dataset_id}/{condition}: enrichment failed: {exc}")
            try:
                goals = explore_goals(
                    summary, condition, config.n_goals_per_dataset, provider
                )
            except _GOAL_FAILURES as exc:
                warnings.append(
                    f"{dataset_id}/{condition}: goal generation failed: {exc}"
                )
                continue
            if len(goals) < config.n_goals_per_dataset:
                warnings.append(
                    f"{dataset_id}/{condition}: only {len(goals)} of "
                    f"{config.n_goals_per_dataset} goals survived filtering"
                )
            for grammar in config.grammars:
                for goal in goals:
                    for _ in range(config.visualizations_per_goal):
                        outcomes.append(
                            _run_one(
                                summary, condition, goal, grammar, policy, provider,
                                config, dataset_id, dataset, reg, limits, work_root,
                                warnings,
                            )
                        )
    return build_report(
        outcomes,
        warnings,
        datasets=tuple(dataset_ids),
        grammars=config.grammars,
        conditions=config.conditions,
    )


def _run_one(
    summary, condition, goal, grammar, policy, provider, config,
    dataset_id, dataset_path, registry, limits, work_root, warnings,
) -> RunOutcome:
    try:
        candidate = generate_visualization(
            summary, condition, goal, grammar, policy, provider,
            config=config.generation, limits=limits,
            dataset_path=dataset_path, registry=registry, work_root=work_root,
        )
    except NoViableCandidate as exc:
        failed = exc.candidates[0] if exc.candidates else None
        status = failed.status if failed is not None else "compile_error"
        return RunOutcome(
            dataset=dataset_id, grammar=grammar, condition=condition,
            goal_index=goal.index, status=status,
        )
    sevq = None
    if config.evaluate_sevq and candidate.status == "compiled_ok":
        try:
            sevq = evaluate(candidate.assembled_code, goal, provider).sevq
        except ScoreParseFailure as exc:
            warnings.append(
                f"{dataset_id}/{condition}/{grammar}/goal{goal.index}: "
                f"quality scoring failed: {exc}"
            )
    return RunOutcome(
        dataset=dataset_id, grammar=grammar, condition=condition,
        goal_index=goal.index, status=candidate.status, sevq=sevq,
    )
