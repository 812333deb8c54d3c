#!/usr/bin/env python3
"""Regenerate frozen truth boxes for the localization fixtures.

The truth comes from the typesetter's layout engine directly: every ink
rectangle remembers its source offset, so the expected page-fraction box
of any source span is computable without running the color pipeline.
Localization accuracy tests compare pipeline output against these files,
so regenerate them only when the fixtures or the typesetter change, and
commit the result.

Usage: python3 scripts/make_fixture_truth.py [fixture ...]
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from papergloss.defextract import analyze_equation
from papergloss.locate import LocateReport
from papergloss.minitex.layout import compile_tex
from papergloss.minitex.oracle import span_boxes
from papergloss.pipeline import _fold_span_parts, enumerate_targets
from papergloss.texscan import assemble_document, detect_equations, segment_sentences

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def build_truth(fixture_dir: Path) -> dict:
    document = assemble_document(fixture_dir, "main.tex")
    equations = detect_equations(document.text)
    sentences = segment_sentences(document.text, equations)
    analyses = {eq.id: analyze_equation(eq) for eq in equations}
    targets, _ = enumerate_targets(document, sentences, equations, analyses)

    truth = span_boxes(document.text, {t.id: t.span for t in targets})
    report = LocateReport(boxes=truth)
    _fold_span_parts(report)
    if report.misses:
        raise SystemExit(
            f"{fixture_dir.name}: no ink for targets {report.misses}; "
            "adjust the fixture so every target produces visible glyphs"
        )
    return {
        "fixture": fixture_dir.name,
        "pages": compile_tex(document.text).pages,
        "targets": {
            tid: [box.round().to_json() for box in boxes]
            for tid, boxes in sorted(report.boxes.items())
        },
    }


def main(argv: list[str]) -> int:
    names = argv or sorted(p.name for p in FIXTURES.iterdir() if p.is_dir())
    for name in names:
        fixture_dir = FIXTURES / name
        truth = build_truth(fixture_dir)
        out = fixture_dir / "truth.json"
        out.write_text(json.dumps(truth, indent=2, sort_keys=True) + "\n")
        print(
            f"{name}: {len(truth['targets'])} targets over "
            f"{truth['pages']} page(s) -> {out}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
