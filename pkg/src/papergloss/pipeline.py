"""Staged pipeline: TeX sources in, validated manifest out.

Stages run in a fixed order and any prefix of that order is a valid run.
Each stage persists its artifact before the next stage starts, so a failed
run leaves everything completed so far on disk:

    scan      working.tex, equations.json
    parse     symbols.json
    locate    boxes.json
    extract   definitions.json
    manifest  manifest.json

Artifacts are JSON with sorted keys, making repeat runs byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .config import PipelineConfig
from .defextract import (
    EquationSymbols,
    analyze_equation,
    extract_definitions,
    find_term_occurrences,
    index_usages,
    term_occurrence_id,
    term_surfaces_from_definitions,
)
from .locate import ColorTarget, LocateReport, locate_targets
from .manifest import PaperManifest, build_manifest, save_manifest
from .texscan import (
    EquationSpan,
    SentenceRecord,
    WorkingDocument,
    assemble_document,
    detect_equations,
    segment_sentences,
)

STAGES = ("scan", "parse", "locate", "extract", "manifest")


class StageError(Exception):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")


@dataclass
class PipelineState:
    document: WorkingDocument | None = None
    equations: list[EquationSpan] = field(default_factory=list)
    sentences: list[SentenceRecord] = field(default_factory=list)
    analyses: dict[str, EquationSymbols] = field(default_factory=dict)
    report: LocateReport | None = None
    definitions: list = field(default_factory=list)
    term_occurrences: dict = field(default_factory=dict)
    usages: object = None
    manifest: PaperManifest | None = None


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _record_json(record) -> dict:
    return {
        "id": record.id,
        "key": record.normalized_key,
        "kind": record.kind,
        "tex": record.tex,
        "spans": [list(s) for s in record.spans],
        "parent": record.parent,
        "children": list(record.children),
    }


def enumerate_targets(
    document: WorkingDocument,
    sentences: list[SentenceRecord],
    equations: list[EquationSpan],
    analyses: dict[str, EquationSymbols],
) -> tuple[list[ColorTarget], dict]:
    """Everything the colorizer should paint, plus the term occurrence map.

    Sentences and equations are colored whole.  Symbol records are colored
    directly only when they are leaves or accent groups; script and function
    applications inherit boxes from their children later.  A record with
    several spans gets one target per span, suffixed ``#1``, ``#2``, ...;
    the driver folds these back onto the record id.
    """
    targets = [
        ColorTarget(s.id, (s.span.start, s.span.end)) for s in sentences
    ]
    for eq in equations:
        paint = eq.body_span if eq.display else eq.span
        targets.append(ColorTarget(eq.id, (paint.start, paint.end)))
        analysis = analyses.get(eq.id)
        if analysis is None:
            continue
        base = eq.body_span.start
        for record in analysis.records:
            if record.kind not in ("simple", "accent"):
                continue
            for j, (s0, s1) in enumerate(record.spans):
                tid = record.id if j == 0 else f"{record.id}#{j}"
                targets.append(ColorTarget(tid, (base + s0, base + s1)))

    definitions = extract_definitions(sentences, analyses)
    surfaces = term_surfaces_from_definitions(definitions)
    occurrences = find_term_occurrences(document.text, sentences, equations, surfaces)
    for surface, spans in occurrences.items():
        for i, span in enumerate(spans):
            targets.append(
                ColorTarget(term_occurrence_id(surface, i), (span.start, span.end))
            )
    return targets, occurrences


def _fold_span_parts(report: LocateReport) -> None:
    """Merge '#k' span-part boxes back onto their base record ids."""
    parts = sorted(t for t in report.boxes if "#" in t)
    for tid in parts:
        base = tid.split("#", 1)[0]
        extra = report.boxes.pop(tid)
        merged = report.boxes.get(base, []) + extra
        report.boxes[base] = sorted(
            merged, key=lambda b: (b.page, b.top, b.left)
        )
    report.misses = sorted(t for t, boxes in report.boxes.items() if not boxes)


# --- stages ----------------------------------------------------------------


def _stage_scan(state: PipelineState, config: PipelineConfig, out: Path) -> None:
    document = assemble_document(config.source_dir, config.main, config.expand_macros)
    state.document = document
    state.equations = detect_equations(document.text)
    state.sentences = segment_sentences(document.text, state.equations)
    (out / "working.tex").write_text(document.text)
    _write_json(
        out / "equations.json",
        {
            "document": {"name": document.name, "chars": len(document.text)},
            "equations": [eq.to_json() for eq in state.equations],
            "sentences": [s.to_json() for s in state.sentences],
        },
    )


def _stage_parse(state: PipelineState, config: PipelineConfig, out: Path) -> None:
    state.analyses = {eq.id: analyze_equation(eq) for eq in state.equations}
    payload = {}
    for qid, analysis in state.analyses.items():
        payload[qid] = {
            "symbols": [_record_json(r) for r in analysis.records],
            "lone_key": analysis.lone_key,
            "parse_error": analysis.parse_error,
        }
    _write_json(out / "symbols.json", {"equations": payload})


def _stage_locate(state: PipelineState, config: PipelineConfig, out: Path) -> None:
    targets, occurrences = enumerate_targets(
        state.document, state.sentences, state.equations, state.analyses
    )
    state.term_occurrences = occurrences
    report = locate_targets(state.document.text, targets, config.locate)
    _fold_span_parts(report)
    state.report = report
    _write_json(
        out / "boxes.json",
        {
            "boxes": {
                tid: [b.round().to_json() for b in boxes]
                for tid, boxes in report.boxes.items()
            },
            "misses": report.misses,
            "compile_count": report.compile_count,
            "page_count": report.page_count,
            "warnings": report.warnings,
        },
    )


def _stage_extract(state: PipelineState, config: PipelineConfig, out: Path) -> None:
    state.definitions = extract_definitions(state.sentences, state.analyses)
    surfaces = term_surfaces_from_definitions(state.definitions)
    state.term_occurrences = find_term_occurrences(
        state.document.text, state.sentences, state.equations, surfaces
    )
    state.usages = index_usages(state.sentences, state.analyses, surfaces)
    _write_json(
        out / "definitions.json",
        {
            "definitions": [r.to_json() for r in state.definitions],
            "term_occurrences": {
                surface: [s.to_json() for s in spans]
                for surface, spans in state.term_occurrences.items()
            },
            "usages": {
                "sentences": state.usages.sentences,
                "counts": state.usages.counts,
            },
        },
    )


def _stage_manifest(state: PipelineState, config: PipelineConfig, out: Path) -> None:
    report = state.report
    pages = report.page_count
    if not pages:
        highest = max(
            (b.page for boxes in report.boxes.values() for b in boxes),
            default=-1,
        )
        pages = highest + 1 if highest >= 0 else 1
    state.manifest = build_manifest(
        paper_id=paper_id_for(config),
        pages=pages,
        sentences=state.sentences,
        equations=state.equations,
        analyses=state.analyses,
        definitions=state.definitions,
        usages=state.usages,
        located=report.boxes,
        term_occurrences=state.term_occurrences,
    )
    save_manifest(state.manifest, out / "manifest.json")


_STAGE_FUNCS = {
    "scan": _stage_scan,
    "parse": _stage_parse,
    "locate": _stage_locate,
    "extract": _stage_extract,
    "manifest": _stage_manifest,
}


def paper_id_for(config: PipelineConfig) -> str:
    if config.paper_id:
        return config.paper_id
    name = Path(config.source_dir).resolve().name
    return name or "paper"


def check_stage_prefix(stages: tuple[str, ...]) -> None:
    if tuple(stages) != STAGES[: len(stages)] or not stages:
        raise ValueError(
            f"stages must be a non-empty prefix of {'/'.join(STAGES)}, "
            f"got {list(stages)}"
        )


def run_pipeline(config: PipelineConfig) -> PipelineState:
    check_stage_prefix(config.stages)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    state = PipelineState()
    for stage in config.stages:
        try:
            _STAGE_FUNCS[stage](state, config, out)
        except Exception as exc:
            raise StageError(stage, exc) from exc
    return state
