"""Record the provider traffic behind the UI test scenario.

Drives the service in-process with the deterministic responder while a
recording wrapper captures every provider exchange, then writes the cassette
the vitest suite replays against a real `vizsmith serve --provider replay`
process. The HTTP calls here must mirror tests/ui.test.ts step for step; a
drifted scenario shows up as a replay miss (HTTP 502) in the tests.

Run from frontend/:  python3 tools/record_cassette.py
"""

import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from vizsmith.bench import corpus_path
from vizsmith.fixtures import HeuristicResponder
from vizsmith.llm.cassette import Cassette
from vizsmith.llm.providers import RecordingProvider
from vizsmith.service import ServiceSettings, create_app

# Keep in sync with the SCENARIO constants in tests/ui.test.ts.
REFINE_INSTRUCTION = 'set the title to "Readability"'
MPG_DESCRIPTION = "distance travelled per unit of fuel"
VISUALIZE_BODY = {
    "goal_index": 0,
    "grammar_id": "chart-json",
    "policy": "compile_discard",
    "n_candidates": 1,
}


def main() -> None:
    out = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "ui.cassette.json"
    cassette = Cassette()
    with tempfile.TemporaryDirectory() as storage:
        app = create_app(
            provider=RecordingProvider(HeuristicResponder(), cassette),
            settings=ServiceSettings(storage_dir=storage),
        )
        with TestClient(app) as client:
            with open(corpus_path("cars.csv"), "rb") as fh:
                uploaded = client.post(
                    "/datasets",
                    files={"file": ("cars.csv", fh, "text/csv")},
                    data={"condition": "enrich"},
                )
            uploaded.raise_for_status()
            sid = uploaded.json()["session_id"]
            base = f"/sessions/{sid}"

            client.post(f"{base}/visualize", json=VISUALIZE_BODY).raise_for_status()
            client.post(f"{base}/visualizations/0/evaluate").raise_for_status()
            client.post(
                f"{base}/visualizations/0/refine", json={"instruction": REFINE_INSTRUCTION}
            ).raise_for_status()
            client.post(
                f"{base}/summary/refine",
                json={"fields": {"mpg": {"description": MPG_DESCRIPTION}}},
            ).raise_for_status()
            client.post(f"{base}/visualize", json=VISUALIZE_BODY).raise_for_status()

    out.parent.mkdir(parents=True, exist_ok=True)
    cassette.save(out)
    print(f"recorded {len(cassette)} provider exchanges -> {out}")


if __name__ == "__main__":
    main()
