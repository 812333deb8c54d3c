#!/usr/bin/env python3
"""Export service responses for the frontend test suite.

Builds the mixture fixture, runs the JSON API against it in process, and
saves the responses the overlay consumes into frontend/tests/fixtures/.
Rerun after changing the pipeline, the serve module, or the fixture.
"""

import json
import shutil
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from fastapi.testclient import TestClient

from papergloss.config import PipelineConfig
from papergloss.manifest import load_manifest
from papergloss.pipeline import run_pipeline
from papergloss.serve import PaperStore, create_app

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "frontend" / "tests" / "fixtures"
PAPER = "mixture"


def dump(name: str, payload) -> None:
    path = OUT / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def main() -> int:
    build_dir = Path(tempfile.mkdtemp(prefix="uifix_"))
    try:
        run_pipeline(
            PipelineConfig(
                source_dir=str(ROOT / "fixtures" / PAPER),
                out_dir=str(build_dir),
                paper_id=PAPER,
            )
        )
        manifest_path = build_dir / "manifest.json"
        manifest = load_manifest(manifest_path)

        store = PaperStore()
        store.add(PAPER, manifest_path)
        client = TestClient(create_app(store))

        def get(path: str):
            response = client.get(path)
            assert response.status_code == 200, (path, response.status_code)
            return response.json()

        dump("manifest.json", manifest.data)
        entities = get(f"/v1/papers/{PAPER}/entities")
        dump("entities.json", entities)

        k = manifest.entity_by_key["symbol:k"]
        first, second = manifest.definitions_for(k["id"])
        span1 = manifest.source_span(first["source"])
        span2 = manifest.source_span(second["source"])
        positions = {
            "before": 0,
            "between": (span1["end"] + span2["start"]) // 2,
            "after": span2["end"] + 1,
            "inside": (span1["start"] + span1["end"]) // 2,
        }
        views = {
            name: get(
                f"/v1/papers/{PAPER}/entities/{k['id']}/definition?pos={pos}"
            )
            for name, pos in positions.items()
        }
        dump("definition_views.json", {"entity": k["id"], "positions": positions, "views": views})

        for kind in ("definitions", "formulae", "usages"):
            dump(
                f"lists_k_{kind}.json",
                get(f"/v1/papers/{PAPER}/entities/{k['id']}/lists/{kind}"),
            )

        dump("declutter_k.json", get(f"/v1/papers/{PAPER}/declutter/{k['id']}"))

        display_eq = next(
            qid
            for qid, eq in sorted(manifest.equations.items())
            if eq["display"] and eq["boxes"]
        )
        dump("diagram.json", get(f"/v1/papers/{PAPER}/equations/{display_eq}/diagram"))
        dump("glossary.json", get(f"/v1/papers/{PAPER}/glossary"))
        print(f"wrote fixtures for {PAPER} to {OUT}")
        return 0
    finally:
        shutil.rmtree(build_dir, ignore_errors=True)


if __name__ == "__main__":
    raise SystemExit(main())
