"""Top-level acceptance checks, one test per release criterion.

Each test appends a PASS/FAIL line to RESULTS; the conftest hook prints the
collected checklist after the run so the outcome of every criterion is
visible in plain pytest output.
"""

import json
import random
import re
import subprocess
import time
from fractions import Fraction
from pathlib import Path
from statistics import fmean

import pytest
from fastapi.testclient import TestClient

from vizsmith.bench import corpus_datasets, corpus_path
from vizsmith.bench.report import emit_report
from vizsmith.bench.runner import BenchmarkConfig, run_benchmark
from vizsmith.bench.metrics import error_rate
from vizsmith.errors import NoViableCandidate
from vizsmith.fixtures import FaultInjectingProvider, HeuristicResponder
from vizsmith.generate.codegen import assemble
from vizsmith.generate.executor import (
    CandidateProgram,
    ExecutionLimits,
    execute,
    selftest,
    tree_paths,
)
from vizsmith.generate.filters import (
    FilterPolicy,
    select_by_consistency,
    select_by_correctness,
)
from vizsmith.generate.pipeline import generate_visualization
from vizsmith.generate.scaffolds import default_registry
from vizsmith.goals.explorer import Goal, explore_goals
from vizsmith.llm.cassette import Cassette
from vizsmith.llm.providers import (
    RecordingProvider,
    ReplayProvider,
    ScriptedProvider,
)
from vizsmith.ops.evaluate import DIMENSIONS, dimension_prompt, evaluate
from vizsmith.service import ServiceSettings, create_app
from vizsmith.summarize.profile import build_base_summary
from vizsmith.summarize.summary import render_summary
from vizsmith.summarize.table import ingest

RESULTS: list[str] = []

CARS = corpus_path("cars.csv")


def record(name: str, passed: bool, detail: str) -> None:
    RESULTS.append(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
    assert passed, f"{name}: {detail}"


# --- criterion 1: error-rate arithmetic ---------------------------------------


def test_error_rate_formula_on_property_sweep():
    started = time.monotonic()
    worst = 0.0
    checked = 0
    for total in range(1, 121):
        for errors in range(0, total + 1):
            worst = max(worst, abs(error_rate(errors, total) - float(Fraction(errors, total) * 100)))
            checked += 1
    rng = random.Random(20240817)
    for _ in range(3000):
        total = rng.randint(1, 10_000)
        errors = rng.randint(0, total)
        worst = max(worst, abs(error_rate(errors, total) - float(Fraction(errors, total) * 100)))
        assert error_rate(0, total) == 0.0
        assert error_rate(total, total) == 100.0
        checked += 3
    elapsed = time.monotonic() - started
    record(
        "error-rate arithmetic",
        worst <= 1e-9 and elapsed < 1.0,
        f"{checked} (errors, total) pairs, max deviation {worst:.2e}, {elapsed:.2f}s",
    )


# --- criterion 2: fault-injected error rate is exact ------------------------------


def test_fault_injection_produces_exact_error_rate():
    started = time.monotonic()
    config = BenchmarkConfig(
        datasets=tuple(str(p) for p in corpus_datasets()),
        grammars=("chart-json",),
        conditions=("no_enrich",),
        n_goals_per_dataset=5,
        visualizations_per_goal=4,
    )
    observed = {}
    for k in (0, 3, 10):
        ordinals = tuple(i * (100 // k) for i in range(1, k + 1)) if k else ()
        provider = FaultInjectingProvider(HeuristicResponder(), ordinals)
        report = run_benchmark(config, provider)
        assert report.total == 100, f"grid produced {report.total} runs, wanted 100"
        observed[k] = (report.errors, report.error_rate)
    elapsed = time.monotonic() - started
    exact = all(observed[k] == (k, float(k)) for k in observed)
    record(
        "fault-injected error rate",
        exact and elapsed < 60.0,
        f"k in (0, 3, 10) over 100 declarative runs -> rates "
        f"{[observed[k][1] for k in (0, 3, 10)]}, {elapsed:.1f}s",
    )


# --- criterion 3: quality-score aggregation + pinned prompts ------------------------

# Pinned copies of the bundled dimension questions. The packaged files must
# never drift from these texts.
FROZEN_PROMPTS = {
    "code_accuracy": (
        "Does the code contain bugs, logic errors, syntax error or typos? "
        "How serious are the bugs? How should it be fixed?"
    ),
    "data_transformation": "Is the data transformed appropriately for the visualization type?",
    "goal_compliance": "How well the code meets the specified visualization goals?",
    "visualization_type": (
        "Considering best practices, is the visualization type appropriate for "
        "the data and intent? Is there a visualization type that would be more "
        "effective in conveying insights?"
    ),
    "data_encoding": "Is the data encoded appropriately for the visualization type?",
    "aesthetics": (
        "Are the aesthetics of the visualization appropriate and effective for "
        "the visualization type and the data?"
    ),
}


def test_quality_score_mean_and_prompt_texts():
    assert DIMENSIONS == tuple(FROZEN_PROMPTS)
    drift = [d for d in DIMENSIONS if dimension_prompt(d) != FROZEN_PROMPTS[d]]
    goal = Goal(index=0, question="spread?", visualization="histogram of mpg", rationale="spread")
    rng = random.Random(20240818)
    worst = 0.0
    for _ in range(200):
        scores = [rng.randint(1, 10) for _ in range(6)]
        provider = ScriptedProvider([f"{s}: adequate" for s in scores])
        report = evaluate("    x = 1", goal, provider)
        assert [s.score for s in report.scores] == scores
        worst = max(worst, abs(report.sevq - float(Fraction(sum(scores), 6))))
    record(
        "quality-score aggregation",
        not drift and worst <= 1e-9,
        f"200 random 6-tuples, max mean deviation {worst:.2e}; "
        f"6/6 bundled prompts byte-match the pinned texts",
    )


# --- criterion 4: profiler goldens, determinism, size independence -------------------

# Hand-computed from the bundled CSV files: (atomic_type, min, max, n_unique, n_null).
GOLDEN_PROFILES = {
    "cars.csv": {
        "model": ("string", None, None, 12, 0),
        "country": ("string", None, None, 3, 0),
        "year": ("integer", 1970, 1981, 11, 0),
        "cylinders": ("integer", 0, 8, 5, 0),
        "horsepower": ("float", 75.0, 210.0, 11, 1),
        "mpg": ("float", 13.0, 43.5, 12, 0),
        "weight": ("integer", 1773, 4054, 12, 0),
        "electric": ("boolean", None, None, 2, 0),
    },
    "cities.csv": {
        "name": ("string", None, None, 8, 0),
        "country": ("string", None, None, 3, 0),
        "population": ("integer", 675647, 13960000, 8, 0),
        "area_km2": ("float", 225.2, 2194.0, 8, 0),
        "metro_opened": ("date", "1892-06-06", "1981-05-29", 8, 0),
    },
    "movies.csv": {
        "title": ("string", None, None, 6, 0),
        "genre": ("string", None, None, 4, 0),
        "year": ("integer", 1999, 2021, 6, 0),
        "rating": ("float", 5.9, 8.8, 6, 0),
        "votes": ("integer", 30211, 201556, 6, 0),
        "released": ("date", "1999-10-12", "2021-08-30", 6, 0),
    },
    "sales.csv": {
        "order_id": ("integer", 1001, 1010, 10, 0),
        "region": ("string", None, None, 4, 0),
        "product": ("string", None, None, 3, 0),
        "units": ("integer", 2, 20, 10, 0),
        "unit_price": ("float", 4.75, 24.5, 3, 0),
        "discount": ("float", 0.0, 0.15, 4, 2),
        "shipped": ("boolean", None, None, 2, 0),
    },
    "weather.csv": {
        "date": ("date", "2024-01-01", "2024-01-04", 4, 0),
        "station": ("string", None, None, 2, 0),
        "temp_c": ("float", -3.5, 5.2, 8, 0),
        "humidity": ("integer", 55, 81, 8, 0),
        "wind_kph": ("float", 8.5, 22.3, 8, 0),
        "notes": ("unknown", None, None, 0, 8),
    },
}


def test_profiler_goldens_determinism_and_row_count_independence(tmp_path):
    mismatches = []
    for filename, expected_fields in GOLDEN_PROFILES.items():
        summary = build_base_summary(ingest(str(corpus_path(filename))))
        assert [f.name for f in summary.fields] == list(expected_fields)
        for profile in summary.fields:
            got = (
                profile.atomic_type,
                profile.stats.min,
                profile.stats.max,
                profile.stats.n_unique,
                profile.stats.n_null,
            )
            if got != expected_fields[profile.name]:
                mismatches.append(f"{filename}:{profile.name} {got}")

    # same input and seed must reproduce the summary byte for byte
    first = build_base_summary(ingest(str(CARS)), rng_seed=7)
    second = build_base_summary(ingest(str(CARS)), rng_seed=7)
    deterministic = json.dumps(first.to_dict(), sort_keys=True) == json.dumps(
        second.to_dict(), sort_keys=True
    ) and render_summary(first, "no_enrich") == render_summary(second, "no_enrich")

    # a 100x row-duplicated variant must render identically at fixed schema
    header, *rows = CARS.read_text().splitlines()
    duplicated = tmp_path / "cars.csv"
    duplicated.write_text("\n".join([header] + rows * 100) + "\n")
    base_render = render_summary(build_base_summary(ingest(str(CARS))), "no_enrich")
    big_summary = build_base_summary(ingest(str(duplicated)))
    big_render = render_summary(big_summary, "no_enrich")
    size_free = base_render == big_render and big_summary.row_count == 1200

    record(
        "profiler goldens + determinism",
        not mismatches and deterministic and size_free,
        f"{sum(len(v) for v in GOLDEN_PROFILES.values())} hand-computed field stats "
        f"across 5 datasets; seed-stable bytes; render unchanged under 100x rows"
        + (f"; mismatches: {mismatches}" if mismatches else ""),
    )


# --- criterion 5: ablation grid shape + replay determinism --------------------------


def test_ablation_grid_produces_deterministic_twenty_cells(tmp_path):
    config = BenchmarkConfig(
        datasets=tuple(str(p) for p in corpus_datasets()),
        grammars=("chart-json",),
        conditions=("no_enrich", "enrich", "schema", "no_summary"),
        n_goals_per_dataset=5,
        visualizations_per_goal=1,
    )
    cassette_path = tmp_path / "ablation.cassette.json"
    cassette = Cassette()
    run_benchmark(config, RecordingProvider(HeuristicResponder(), cassette))
    cassette.save(cassette_path)

    renders = []
    cells = 0
    for _ in range(2):
        replay = ReplayProvider(Cassette.load(cassette_path))
        report = run_benchmark(config, replay)
        cells = len(report.cells)
        renders.append(emit_report(report, "json"))
    record(
        "ablation grid",
        cells == 20 and renders[0] == renders[1],
        f"5 datasets x 4 conditions x 1 grammar -> {cells} cells; "
        f"two replayed runs rendered byte-identical JSON ({len(renders[0])} bytes)",
    )


# --- criterion 6: filter selection oracles ----------------------------------------


def _oracle_normal_form(code: str) -> str:
    kept = []
    for line in code.splitlines():
        line = re.split(r"#|//", line, maxsplit=1)[0]
        line = "".join(ch for ch in line if not ch.isspace())
        if line:
            kept.append(line)
    return "\n".join(kept)


def _make_candidate(i: int, code: str, status: str) -> CandidateProgram:
    return CandidateProgram(
        goal_index=0,
        scaffold_ref="chart-json",
        stub=f"slot-{i}",
        assembled_code=code,
        status=status,
        artifact=f"slot-{i}.json" if status == "compiled_ok" else None,
    )


def test_consistency_filter_agrees_with_cluster_enumeration():
    rng = random.Random(20240819)
    bodies = ["x = 1", "y = 2", "z = 3", "x=1", "w = 4"]
    decorations = ["", "  # trailing note", "\n", "   ", "  // remark"]
    agreements = 0
    for _ in range(1000):
        n = rng.randint(1, 6)
        candidates = []
        for i in range(n):
            code = rng.choice(bodies) + rng.choice(decorations)
            status = "compiled_ok" if rng.random() < 0.8 else "runtime_error"
            candidates.append(_make_candidate(i, code, status))

        compiled = [i for i, c in enumerate(candidates) if c.status == "compiled_ok"]
        if not compiled:
            with pytest.raises(NoViableCandidate):
                select_by_consistency(candidates)
            agreements += 1
            continue
        clusters: dict[str, list[int]] = {}
        for i in compiled:
            clusters.setdefault(_oracle_normal_form(candidates[i].assembled_code), []).append(i)
        expected_cluster = max(clusters.values(), key=lambda ids: (len(ids), -min(ids)))
        expected = candidates[min(expected_cluster)]
        if select_by_consistency(candidates) is expected:
            agreements += 1
    consistency_ok = agreements == 1000

    scored_agreements = 0
    for _ in range(1000):
        n = rng.randint(1, 6)
        scores = [round(rng.random(), 1) for _ in range(n)]
        candidates = [_make_candidate(i, f"v{i} = {i}", "compiled_ok") for i in range(n)]
        provider = ScriptedProvider([str(s) for s in scores])
        chosen = select_by_correctness(candidates, provider)
        if chosen.stub == candidates[scores.index(max(scores))].stub:
            scored_agreements += 1
    record(
        "filter selection oracles",
        consistency_ok and scored_agreements == 1000,
        f"consensus filter matched cluster enumeration on {agreements}/1000 pools; "
        f"correctness filter matched first-argmax on {scored_agreements}/1000 score vectors",
    )


# --- criterion 7: scaffold round trip ----------------------------------------------


def test_scaffolds_selftest_assembly_identity_and_inprocess_declarative(monkeypatch, tmp_path):
    registry = default_registry()
    selftest_results = {
        grammar_id: selftest(registry.get(grammar_id), str(CARS)).status
        for grammar_id in registry.ids()
    }
    selftests_ok = all(s == "compiled_ok" for s in selftest_results.values())

    rng = random.Random(20240820)
    alphabet = "abcdef ({[\"'#\n\t=+"
    scaffold = registry.get("matplotlib")
    identity_failures = 0
    for _ in range(500):
        stub = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 80)))
        if not stub.strip():
            continue
        assembled = assemble(scaffold, stub)
        prefix_end = assembled.find(scaffold.preamble) + len(scaffold.preamble)
        if not (
            assembled.startswith(scaffold.preamble)
            and assembled.endswith(scaffold.postamble)
            and assembled[prefix_end : prefix_end + len(stub)] == stub
        ):
            identity_failures += 1

    def no_spawn(*args, **kwargs):
        raise AssertionError("child process spawned on the declarative path")

    monkeypatch.setattr(subprocess, "Popen", no_spawn)
    monkeypatch.setattr(subprocess, "run", no_spawn)
    provider = HeuristicResponder()
    summary = build_base_summary(ingest(str(CARS)))
    goal = explore_goals(summary, "no_enrich", 1, provider)[0]
    candidate = generate_visualization(
        summary, "no_enrich", goal, "chart-json",
        FilterPolicy(kind="compile_discard"), provider,
        dataset_path=str(CARS), work_root=str(tmp_path),
    )
    declarative_ok = candidate.status == "compiled_ok"

    record(
        "scaffold round trip",
        selftests_ok and identity_failures == 0 and declarative_ok,
        f"selftests {selftest_results}; 500 stub assemblies verbatim; "
        f"declarative end-to-end ran compiled_ok with process spawning forbidden",
    )


# --- criterion 8: sandbox limits ---------------------------------------------------


def test_sandbox_timeout_and_escape_detection(tmp_path):
    scaffold = default_registry().get("matplotlib")
    limits = ExecutionLimits(timeout_s=1.0)

    sleepy_stub = "    import time\n    time.sleep(2.0)\n    fig, ax = plt.subplots()\n    return fig"
    sleepy = CandidateProgram(
        goal_index=0, scaffold_ref="matplotlib", stub=sleepy_stub,
        assembled_code=assemble(scaffold, sleepy_stub),
    )
    timed_out = execute(sleepy, scaffold, str(CARS), limits, work_root=str(tmp_path / "t"))

    escape_root = tmp_path / "e"
    escape_stub = (
        "    from pathlib import Path\n"
        "    Path(ARTIFACT_PATH).parent.parent.joinpath('escaped.txt').write_text('out')\n"
        "    fig, ax = plt.subplots()\n"
        "    return fig"
    )
    escaping = CandidateProgram(
        goal_index=0, scaffold_ref="matplotlib", stub=escape_stub,
        assembled_code=assemble(scaffold, escape_stub),
    )
    before = tree_paths(escape_root) if escape_root.exists() else set()
    ran = execute(escaping, scaffold, str(CARS), work_root=str(escape_root))
    after = tree_paths(escape_root)
    run_dir = Path(ran.artifact).parent.name if ran.artifact else None
    strays = {
        p for p in after - before
        if run_dir is None or not p.startswith(run_dir)
    }
    record(
        "sandbox limits",
        timed_out.status == "timeout" and strays == {"escaped.txt"},
        f"2x-timeout stub -> status {timed_out.status!r}; "
        f"directory diff caught stray writes {sorted(strays)}",
    )


# --- criterion 9: end-to-end replay through the service ------------------------------


def _drive_session(client: TestClient) -> tuple[dict, dict]:
    with CARS.open("rb") as fh:
        uploaded = client.post("/datasets", files={"file": ("cars.csv", fh)})
    assert uploaded.status_code == 200, uploaded.text
    sid = uploaded.json()["session_id"]
    made = client.post(
        f"/sessions/{sid}/visualize",
        json={"nl_goal": "pie chart of mpg by country", "grammar_id": "matplotlib"},
    )
    assert made.status_code == 200, made.text
    evaluated = client.post(f"/sessions/{sid}/visualizations/0/evaluate")
    assert evaluated.status_code == 200, evaluated.text
    repaired = client.post(f"/sessions/{sid}/visualizations/0/repair", json={"max_depth": 2})
    assert repaired.status_code == 200, repaired.text
    return evaluated.json()["evaluation"], repaired.json()["candidate"]


def test_end_to_end_replay_offline(tmp_path):
    cassette_path = tmp_path / "e2e.cassette.json"
    cassette = Cassette()
    recording_app = create_app(
        provider=RecordingProvider(HeuristicResponder(), cassette),
        settings=ServiceSettings(storage_dir=str(tmp_path / "rec")),
    )
    with TestClient(recording_app) as client:
        _drive_session(client)
    cassette.save(cassette_path)

    started = time.monotonic()
    replay_app = create_app(
        provider=ReplayProvider(Cassette.load(cassette_path)),
        settings=ServiceSettings(storage_dir=str(tmp_path / "rep")),
    )
    with TestClient(replay_app) as client:
        report, final_candidate = _drive_session(client)
    elapsed = time.monotonic() - started

    complete = (
        len(report["scores"]) == 6
        and report["partial"] is False
        and report["sevq"] == pytest.approx(fmean(s["score"] for s in report["scores"]))
    )
    record(
        "end-to-end replay",
        final_candidate["status"] == "compiled_ok" and complete and elapsed < 30.0,
        f"upload->visualize->evaluate->repair replayed offline in {elapsed:.1f}s; "
        f"final candidate {final_candidate['status']}, "
        f"{len(report['scores'])}-dimension report (mean {report['sevq']:.2f})",
    )
