"""Position-indexed annotation manifest: assembly, persistence, queries.

The manifest is one JSON document with top-level keys version, paper,
entities, sentences, equations, definitions, and usages.  Everything a
reader client needs is resolvable from it alone: entity boxes per
occurrence, per-entity definition lists sorted by document position,
and the usage index.

Queries answered here:

  select_definition   most recent definition strictly before a position,
                      "defined here" inside a defining sentence, earliest
                      later definition (flagged forward) when nothing
                      precedes
  scent_occurrences   which occurrences get the dotted underline
  declutter_regions   page regions to keep visible for one entity
  build_glossary      defined entities in order of first appearance
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .defextract import (
    DefinitionRecord,
    EquationSymbols,
    UsageIndex,
    dedupe_definitions,
    term_key,
    term_occurrence_id,
)
from .geometry import Box
from .locate import MissingChildError, compose_bounding_boxes
from .texscan import EquationSpan, SentenceRecord, TexSpan

SCHEMA_VERSION = 1

TOP_LEVEL_KEYS = (
    "version",
    "paper",
    "entities",
    "sentences",
    "equations",
    "definitions",
    "usages",
)

DEFINITION_KINDS = ("abbreviation", "prose", "formula")

# When one sentence defines an entity more than once, the tooltip shows
# the most readable record.
_KIND_PRIORITY = {"prose": 0, "formula": 1, "abbreviation": 2}


class ValidationError(Exception):
    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__(
            f"{len(problems)} manifest problem(s): " + "; ".join(problems[:5])
        )


class FormatError(Exception):
    pass


class UnknownEntity(KeyError):
    pass


@dataclass
class DefinitionView:
    status: str  # definition | defined_here | none
    record: dict | None
    forward: bool
    context_link: dict | None
    counts: dict

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "record": self.record,
            "forward": self.forward,
            "context_link": self.context_link,
            "counts": self.counts,
        }


class PaperManifest:
    """Immutable wrapper around the manifest document.

    The raw dict is kept as-is so unknown fields survive a load/save
    cycle; indexes over it are built once here.
    """

    def __init__(self, data: dict):
        self.data = data
        self.entities = {e["id"]: e for e in data.get("entities", [])}
        self.sentences = {s["id"]: s for s in data.get("sentences", [])}
        self.equations = {q["id"]: q for q in data.get("equations", [])}
        self.entity_by_key = {e["key"]: e for e in data.get("entities", [])}
        self.sentence_of_equation = {}
        for sentence in data.get("sentences", []):
            for qid in sentence.get("math_refs", []):
                self.sentence_of_equation.setdefault(qid, sentence["id"])

    @property
    def paper_id(self) -> str:
        return self.data["paper"]["id"]

    def definitions_for(self, entity_id: str) -> list[dict]:
        return self.data.get("definitions", {}).get(entity_id, [])

    def usage_for(self, entity_id: str) -> dict:
        return self.data.get("usages", {}).get(
            entity_id, {"sentences": [], "occurrences": 0}
        )

    def require_entity(self, entity_id: str) -> dict:
        if entity_id not in self.entities:
            raise UnknownEntity(entity_id)
        return self.entities[entity_id]

    def source_span(self, source_id: str) -> dict | None:
        obj = self.sentences.get(source_id) or self.equations.get(source_id)
        return obj["span"] if obj else None

    def source_page(self, source_id: str) -> int | None:
        obj = self.sentences.get(source_id) or self.equations.get(source_id)
        if obj and obj.get("boxes"):
            return obj["boxes"][0]["page"]
        return None


# --- assembly --------------------------------------------------------------


def _resolve_record_boxes(
    analysis: EquationSymbols, located: dict[str, list[Box]]
) -> dict[str, list[Box]]:
    """Boxes per symbol record: located directly for leaves and accents,
    composed from child records otherwise."""
    records = {r.id: r for r in analysis.records}
    resolved: dict[str, list[Box]] = {}

    def resolve(rid: str) -> list[Box]:
        if rid in resolved:
            return resolved[rid]
        record = records[rid]
        if record.kind in ("simple", "accent"):
            boxes = list(located.get(rid, []))
        else:
            child_boxes = {cid: resolve(cid) for cid in record.children}
            try:
                boxes = compose_bounding_boxes(record, child_boxes)
            except MissingChildError:
                boxes = []
        resolved[rid] = boxes
        return boxes

    for rid in records:
        resolve(rid)
    return resolved


def build_manifest(
    paper_id: str,
    pages: int,
    sentences: list[SentenceRecord],
    equations: list[EquationSpan],
    analyses: dict[str, EquationSymbols],
    definitions: list[DefinitionRecord],
    usages: UsageIndex,
    located: dict[str, list[Box]],
    term_occurrences: dict[str, list[TexSpan]],
) -> PaperManifest:
    sentence_of_equation = {}
    for sentence in sentences:
        for qid in sentence.math_refs:
            sentence_of_equation.setdefault(qid, sentence.id)

    def boxes_json(boxes):
        return [b.round().to_json() for b in boxes]

    record_boxes: dict[str, dict[str, list[Box]]] = {}
    for qid, analysis in analyses.items():
        record_boxes[qid] = _resolve_record_boxes(analysis, located)

    # Group symbol records into one entity per normalized key.
    sym_occurrences: dict[str, list[dict]] = {}
    sym_children: dict[str, set[str]] = {}
    for eq in sorted(equations, key=lambda e: e.span.start):
        analysis = analyses.get(eq.id)
        if analysis is None:
            continue
        by_id = {r.id: r for r in analysis.records}
        for record in analysis.records:
            key = record.normalized_key
            position = eq.body_span.start + record.spans[0][0]
            boxes = record_boxes[eq.id].get(record.id, [])
            sym_occurrences.setdefault(key, []).append(
                {
                    "position": position,
                    "sentence": sentence_of_equation.get(eq.id),
                    "equation": eq.id,
                    "record": record.id,
                    "boxes": boxes_json(boxes),
                    "multibox": len(boxes) > 1,
                }
            )
            sym_children.setdefault(key, set())
            for cid in record.children:
                sym_children[key].add(by_id[cid].normalized_key)

    def sentence_containing(span: TexSpan) -> str | None:
        for sentence in sentences:
            if sentence.span.start <= span.start < sentence.span.end:
                return sentence.id
        return None

    term_occ: dict[str, list[dict]] = {}
    for surface, spans in term_occurrences.items():
        for i, span in enumerate(spans):
            boxes = located.get(term_occurrence_id(surface, i), [])
            term_occ.setdefault(surface, []).append(
                {
                    "position": span.start,
                    "sentence": sentence_containing(span),
                    "equation": None,
                    "record": None,
                    "boxes": boxes_json(boxes),
                    "multibox": len(boxes) > 1,
                }
            )

    def first_position(occs):
        return min(o["position"] for o in occs)

    entity_ids: dict[str, str] = {}
    entities = []
    ordered_symbols = sorted(
        (k for k, v in sym_occurrences.items() if v),
        key=lambda k: (first_position(sym_occurrences[k]), k),
    )
    for n, key in enumerate(ordered_symbols, start=1):
        entity_ids[f"symbol:{key}"] = f"s{n}"
    ordered_terms = sorted(
        (s for s, v in term_occ.items() if v),
        key=lambda s: (first_position(term_occ[s]), s),
    )
    for n, surface in enumerate(ordered_terms, start=1):
        entity_ids[term_key(surface)] = f"t{n}"

    for key in ordered_symbols:
        eid = entity_ids[f"symbol:{key}"]
        occs = sorted(sym_occurrences[key], key=lambda o: o["position"])
        for i, occ in enumerate(occs, start=1):
            occ["id"] = f"{eid}.o{i}"
        children = sorted(
            entity_ids[f"symbol:{k}"]
            for k in sym_children.get(key, ())
            if f"symbol:{k}" in entity_ids
        )
        entities.append(
            {
                "id": eid,
                "key": f"symbol:{key}",
                "kind": "symbol",
                "tex": key,
                "children": children,
                "localized": any(o["boxes"] for o in occs),
                "occurrences": occs,
            }
        )
    for surface in ordered_terms:
        eid = entity_ids[term_key(surface)]
        occs = sorted(term_occ[surface], key=lambda o: o["position"])
        for i, occ in enumerate(occs, start=1):
            occ["id"] = f"{eid}.o{i}"
        entities.append(
            {
                "id": eid,
                "key": term_key(surface),
                "kind": "term",
                "tex": surface,
                "children": [],
                "localized": any(o["boxes"] for o in occs),
                "occurrences": occs,
            }
        )

    definitions_json: dict[str, list[dict]] = {}
    dangling = []
    for record in dedupe_definitions(definitions):
        eid = entity_ids.get(record.definiendum)
        if eid is None:
            dangling.append(record.definiendum)
            continue
        definitions_json.setdefault(eid, []).append(
            {
                "entity": eid,
                "definiens": record.definiens,
                "kind": record.kind,
                "source": record.source,
                "position": record.position,
            }
        )

    usages_json: dict[str, dict] = {}
    for key, sids in usages.sentences.items():
        eid = entity_ids.get(key)
        if eid is None:
            continue
        usages_json[eid] = {
            "sentences": list(sids),
            "occurrences": usages.counts.get(key, 0),
        }

    data = {
        "version": SCHEMA_VERSION,
        "paper": {"id": paper_id, "pages": pages},
        "entities": entities,
        "sentences": [
            dict(s.to_json(), boxes=boxes_json(located.get(s.id, [])))
            for s in sentences
        ],
        "equations": [
            _equation_json(eq, analyses.get(eq.id), located, record_boxes)
            for eq in sorted(equations, key=lambda e: e.span.start)
        ],
        "definitions": definitions_json,
        "usages": usages_json,
    }
    manifest = PaperManifest(data)
    problems = validate_manifest(manifest)
    if dangling:
        problems = problems + [
            f"definition for unknown entity key {k!r}" for k in sorted(set(dangling))
        ]
    if problems:
        raise ValidationError(problems)
    return manifest


def _equation_json(eq, analysis, located, record_boxes):
    out = dict(eq.to_json(), boxes=[b.round().to_json() for b in located.get(eq.id, [])])
    if analysis is None or analysis.tree is None:
        out["symbols"] = []
        out["parse_error"] = analysis.parse_error if analysis else "not parsed"
        return out
    out["symbols"] = [
        {
            "id": r.id,
            "key": r.normalized_key,
            "kind": r.kind,
            "tex": r.tex,
            "spans": [list(s) for s in r.spans],
            "parent": r.parent,
            "children": list(r.children),
            "boxes": [b.round().to_json() for b in record_boxes[eq.id].get(r.id, [])],
        }
        for r in analysis.records
    ]
    return out


# --- validation ------------------------------------------------------------


def _check_box(obj, where, problems):
    try:
        box = Box.from_json(obj)
    except (KeyError, TypeError, ValueError):
        problems.append(f"{where}: malformed box {obj!r}")
        return
    try:
        box.validate()
    except ValueError as exc:
        problems.append(f"{where}: {exc}")


def validate_manifest(manifest: PaperManifest) -> list[str]:
    """Every broken reference and malformed field, as human-readable lines."""
    problems: list[str] = []
    data = manifest.data

    for key in TOP_LEVEL_KEYS:
        if key not in data:
            problems.append(f"missing top-level key {key!r}")
    if problems:
        return problems

    if not isinstance(data["version"], int) or data["version"] < 1:
        problems.append(f"bad schema version {data['version']!r}")

    sentence_ids = [s.get("id") for s in data["sentences"]]
    equation_ids = [q.get("id") for q in data["equations"]]
    entity_ids = [e.get("id") for e in data["entities"]]
    for name, ids in (
        ("sentence", sentence_ids),
        ("equation", equation_ids),
        ("entity", entity_ids),
    ):
        dupes = {i for i in ids if ids.count(i) > 1}
        for d in sorted(dupes):
            problems.append(f"duplicate {name} id {d!r}")
    sentence_set = set(sentence_ids)
    equation_set = set(equation_ids)
    entity_set = set(entity_ids)

    keys = [e.get("key") for e in data["entities"]]
    for k in sorted({k for k in keys if keys.count(k) > 1}):
        problems.append(f"duplicate entity key {k!r}")

    for sentence in data["sentences"]:
        sid = sentence.get("id")
        for qid in sentence.get("math_refs", []):
            if qid not in equation_set:
                problems.append(f"sentence {sid}: unknown equation {qid!r}")
        for box in sentence.get("boxes", []):
            _check_box(box, f"sentence {sid}", problems)

    for equation in data["equations"]:
        qid = equation.get("id")
        for box in equation.get("boxes", []):
            _check_box(box, f"equation {qid}", problems)
        record_ids = {r.get("id") for r in equation.get("symbols", [])}
        for record in equation.get("symbols", []):
            rid = record.get("id")
            if record.get("parent") is not None and record["parent"] not in record_ids:
                problems.append(
                    f"equation {qid} symbol {rid}: unknown parent {record['parent']!r}"
                )
            for cid in record.get("children", []):
                if cid not in record_ids:
                    problems.append(
                        f"equation {qid} symbol {rid}: unknown child {cid!r}"
                    )
            for box in record.get("boxes", []):
                _check_box(box, f"equation {qid} symbol {rid}", problems)

    occurrence_ids = set()
    for entity in data["entities"]:
        eid = entity.get("id")
        for child in entity.get("children", []):
            if child not in entity_set:
                problems.append(f"entity {eid}: unknown child entity {child!r}")
        for occ in entity.get("occurrences", []):
            oid = occ.get("id")
            if oid in occurrence_ids:
                problems.append(f"duplicate occurrence id {oid!r}")
            occurrence_ids.add(oid)
            if occ.get("sentence") is not None and occ["sentence"] not in sentence_set:
                problems.append(
                    f"entity {eid} occurrence {oid}: unknown sentence {occ['sentence']!r}"
                )
            if occ.get("equation") is not None and occ["equation"] not in equation_set:
                problems.append(
                    f"entity {eid} occurrence {oid}: unknown equation {occ['equation']!r}"
                )
            for box in occ.get("boxes", []):
                _check_box(box, f"entity {eid} occurrence {oid}", problems)

    for eid, records in data["definitions"].items():
        if eid not in entity_set:
            problems.append(f"definitions for unknown entity {eid!r}")
        positions = [r.get("position") for r in records]
        if positions != sorted(p for p in positions if p is not None):
            problems.append(f"definitions for {eid} not sorted by position")
        for record in records:
            if record.get("kind") not in DEFINITION_KINDS:
                problems.append(
                    f"definition for {eid}: invalid kind {record.get('kind')!r}"
                )
            src = record.get("source")
            if src not in sentence_set and src not in equation_set:
                problems.append(f"definition for {eid}: unknown source {src!r}")
            if record.get("entity") != eid:
                problems.append(
                    f"definition for {eid}: entity field says {record.get('entity')!r}"
                )

    sentence_order = {sid: i for i, sid in enumerate(sentence_ids)}
    for eid, usage in data["usages"].items():
        if eid not in entity_set:
            problems.append(f"usages for unknown entity {eid!r}")
        sids = usage.get("sentences", [])
        for sid in sids:
            if sid not in sentence_set:
                problems.append(f"usages for {eid}: unknown sentence {sid!r}")
        ranks = [sentence_order[s] for s in sids if s in sentence_order]
        if ranks != sorted(ranks):
            problems.append(f"usages for {eid}: sentences out of document order")
        count = usage.get("occurrences")
        if not isinstance(count, int) or count < 0:
            problems.append(f"usages for {eid}: bad occurrence count {count!r}")

    return problems


# --- queries ---------------------------------------------------------------


def _view_counts(manifest: PaperManifest, entity_id: str) -> dict:
    records = manifest.definitions_for(entity_id)
    return {
        "definitions": sum(1 for r in records if r["kind"] in ("prose", "abbreviation")),
        "formulae": sum(1 for r in records if r["kind"] == "formula"),
        "usages": len(manifest.usage_for(entity_id)["sentences"]),
    }


def _context_link(manifest: PaperManifest, record: dict) -> dict:
    source = record["source"]
    sentence = source if source in manifest.sentences else None
    equation = source if source in manifest.equations else None
    if equation and sentence is None:
        sentence = manifest.sentence_of_equation.get(equation)
    return {
        "sentence": sentence,
        "equation": equation,
        "page": manifest.source_page(source),
    }


def select_definition(
    manifest: PaperManifest, entity_id: str, position: int
) -> DefinitionView:
    manifest.require_entity(entity_id)
    counts = _view_counts(manifest, entity_id)
    records = sorted(
        manifest.definitions_for(entity_id),
        key=lambda r: (r["position"], _KIND_PRIORITY.get(r["kind"], 9)),
    )
    if not records:
        return DefinitionView("none", None, False, None, counts)

    for record in records:
        span = manifest.source_span(record["source"])
        if span and span["start"] <= position < span["end"]:
            return DefinitionView(
                "defined_here", record, False, _context_link(manifest, record), counts
            )

    best = None
    for record in records:
        if record["position"] < position:
            if best is None or record["position"] > best["position"]:
                best = record
    if best is not None:
        return DefinitionView(
            "definition", best, False, _context_link(manifest, best), counts
        )
    forward = records[0]
    return DefinitionView(
        "definition", forward, True, _context_link(manifest, forward), counts
    )


def _defining_sentences(manifest: PaperManifest, entity_id: str) -> set[str]:
    out = set()
    for record in manifest.definitions_for(entity_id):
        source = record["source"]
        if source in manifest.sentences:
            out.add(source)
        elif source in manifest.equations:
            sid = manifest.sentence_of_equation.get(source)
            if sid:
                out.add(sid)
    return out


def scent_occurrences(manifest: PaperManifest) -> set[tuple[str, str]]:
    """(entity id, occurrence id) pairs that get the dotted underline."""
    marked = set()
    for entity in manifest.data["entities"]:
        eid = entity["id"]
        if not manifest.definitions_for(eid):
            continue
        defining = _defining_sentences(manifest, eid)
        for occ in entity["occurrences"]:
            if occ.get("sentence") in defining:
                continue
            marked.add((eid, occ["id"]))
    return marked


def declutter_regions(manifest: PaperManifest, entity_id: str) -> list[dict]:
    """Regions to keep visible: occurrence boxes plus their sentences' boxes."""
    entity = manifest.require_entity(entity_id)
    if not entity.get("localized"):
        return []
    by_page: dict[int, list[dict]] = {}

    def add(box):
        by_page.setdefault(box["page"], []).append(box)

    for occ in entity["occurrences"]:
        for box in occ["boxes"]:
            add(box)
    for sid in manifest.usage_for(entity_id)["sentences"]:
        sentence = manifest.sentences.get(sid)
        if sentence:
            for box in sentence.get("boxes", []):
                add(box)
    out = []
    for page in sorted(by_page):
        boxes = sorted(
            by_page[page], key=lambda b: (b["top"], b["left"], b["width"], b["height"])
        )
        unique = [dict(t) for t in dict.fromkeys(tuple(sorted(b.items())) for b in boxes)]
        out.append({"page": page, "boxes": unique})
    return out


def build_glossary(manifest: PaperManifest) -> list[dict]:
    """Defined entities ordered by first appearance; ties break on id."""
    entries = []
    for entity in manifest.data["entities"]:
        records = manifest.definitions_for(entity["id"])
        if not records:
            continue
        occs = entity["occurrences"]
        first = min((o["position"] for o in occs), default=records[0]["position"])
        entries.append(
            {
                "entity": entity["id"],
                "key": entity["key"],
                "kind": entity["kind"],
                "tex": entity["tex"],
                "first_position": first,
                "definitions": records,
            }
        )
    entries.sort(key=lambda e: (e["first_position"], e["entity"]))
    return entries


# --- persistence -----------------------------------------------------------


def save_manifest(manifest: PaperManifest, path) -> None:
    text = json.dumps(manifest.data, indent=2, sort_keys=True) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def load_manifest(path) -> PaperManifest:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read manifest: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"manifest is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise FormatError("manifest root must be an object")
    missing = [k for k in TOP_LEVEL_KEYS if k not in data]
    if missing:
        raise FormatError(f"manifest missing keys: {', '.join(missing)}")
    return PaperManifest(data)
