#!/usr/bin/env python3
"""Run the full pipeline over one bundled fixture and report accuracy.

Usage: python3 scripts/run_fixture_pipeline.py <fixture> [out_dir]

Compares the produced boxes against the fixture's frozen truth.json and
prints per-target pixel deltas at 150 DPI, so a localization regression
is visible immediately without the whole test suite.
"""

import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from papergloss.config import LocateConfig, PipelineConfig
from papergloss.geometry import Box
from papergloss.pipeline import run_pipeline

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
PX_X, PX_Y = 612 * 150 / 72.0, 792 * 150 / 72.0  # page pixels at 150 DPI


def box_delta_px(a: Box, b: Box) -> float:
    return max(
        abs(a.left - b.left) * PX_X,
        abs(a.right - b.right) * PX_X,
        abs(a.top - b.top) * PX_Y,
        abs(a.bottom - b.bottom) * PX_Y,
    )


def main(argv: list[str]) -> int:
    if not argv:
        print(__doc__, file=sys.stderr)
        return 2
    name = argv[0]
    out_dir = Path(argv[1]) if len(argv) > 1 else Path("out") / name
    config = PipelineConfig(
        source_dir=str(FIXTURES / name),
        out_dir=str(out_dir),
        paper_id=name,
        locate=LocateConfig(),
    )
    started = time.perf_counter()
    state = run_pipeline(config)
    elapsed = time.perf_counter() - started

    truth = json.loads((FIXTURES / name / "truth.json").read_text())
    worst = 0.0
    missing = []
    for tid, want_json in truth["targets"].items():
        got = state.report.boxes.get(tid, [])
        want = [Box.from_json(b) for b in want_json]
        if len(got) != len(want):
            missing.append(tid)
            continue
        for g, w in zip(got, want):
            if g.page != w.page:
                missing.append(tid)
                break
            worst = max(worst, box_delta_px(g, w))
    extras = sorted(set(state.report.boxes) - set(truth["targets"]))

    print(f"{name}: {len(truth['targets'])} targets, {elapsed:.1f}s, "
          f"{state.report.compile_count} compiles")
    print(f"worst box delta: {worst:.2f}px at 150 DPI")
    if missing:
        print(f"mismatched targets: {missing}")
    if extras:
        print(f"unexpected extra targets: {extras}")
    return 1 if (missing or extras) else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
