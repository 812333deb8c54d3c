"""Read-only JSON service over built manifests.

Manifests load lazily on first request, are validated once, and are
cached immutably for the process lifetime.  Every response is a pure
function of (manifest, request), so repeated requests return identical
bodies and the service is safe under concurrent reads.

Error responses all carry {"code": ..., "message": ...}.
"""

from __future__ import annotations

import re
import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .diagram import UnlocalizedEquation, plan_diagram
from .manifest import (
    FormatError,
    PaperManifest,
    build_glossary,
    declutter_regions,
    load_manifest,
    scent_occurrences,
    select_definition,
    validate_manifest,
)


class ServeError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


class PaperStore:
    """Maps paper ids to manifest paths; loads lazily, caches forever."""

    def __init__(self):
        self._paths: dict[str, Path] = {}
        self._cache: dict[str, tuple[PaperManifest, set]] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def add(self, paper_id: str, manifest_path) -> None:
        with self._registry_lock:
            self._paths[paper_id] = Path(manifest_path)
            self._locks.setdefault(paper_id, threading.Lock())

    def get(self, paper_id: str) -> tuple[PaperManifest, set]:
        if paper_id not in self._paths:
            raise ServeError(404, "unknown_paper", f"no paper {paper_id!r}")
        if paper_id in self._cache:
            return self._cache[paper_id]
        with self._locks[paper_id]:
            if paper_id in self._cache:
                return self._cache[paper_id]
            try:
                manifest = load_manifest(self._paths[paper_id])
            except FormatError as exc:
                raise ServeError(500, "manifest_unavailable", str(exc)) from exc
            problems = validate_manifest(manifest)
            if problems:
                raise ServeError(
                    500,
                    "invalid_manifest",
                    f"{len(problems)} validation problem(s); first: {problems[0]}",
                )
            self._cache[paper_id] = (manifest, scent_occurrences(manifest))
            return self._cache[paper_id]


def _entity_payload(manifest: PaperManifest, marked: set) -> list[dict]:
    out = []
    for entity in manifest.data["entities"]:
        item = dict(entity)
        item["occurrences"] = [
            dict(occ, underline=(entity["id"], occ["id"]) in marked)
            for occ in entity["occurrences"]
        ]
        item["counts"] = {
            "definitions": sum(
                1
                for r in manifest.definitions_for(entity["id"])
                if r["kind"] in ("prose", "abbreviation")
            ),
            "formulae": sum(
                1
                for r in manifest.definitions_for(entity["id"])
                if r["kind"] == "formula"
            ),
            "usages": len(manifest.usage_for(entity["id"])["sentences"]),
        }
        out.append(item)
    return out


def _symbol_highlights(manifest: PaperManifest, source_id: str, key: str):
    equation = manifest.equations.get(source_id)
    if equation is None:
        return []
    return [
        list(span)
        for record in equation.get("symbols", [])
        if record["key"] == key
        for span in record.get("spans", [])
    ]


def _term_highlights(text: str, surface: str):
    pattern = re.compile(
        r"(?<![A-Za-z0-9])" + re.escape(surface) + r"(?![A-Za-z0-9])"
    )
    return [[m.start(), m.end()] for m in pattern.finditer(text)]


def _excerpt(manifest: PaperManifest, entity: dict, source_id: str) -> dict:
    kind, _, key = entity["key"].partition(":")
    sentence = manifest.sentences.get(source_id)
    if sentence is not None:
        text = sentence["text"]
        if kind == "term":
            highlights = _term_highlights(text, key)
        else:
            # Highlight the math placeholders whose equations contain the
            # symbol.
            highlights = []
            refs = sentence.get("math_refs", [])
            spans = [
                [m.start(), m.end()] for m in re.finditer(r"\$[^$]*\$", text)
            ]
            for ref, span in zip(refs, spans):
                eq = manifest.equations.get(ref)
                if eq and any(r["key"] == key for r in eq.get("symbols", [])):
                    highlights.append(span)
        return {
            "source": source_id,
            "kind": "sentence",
            "page": manifest.source_page(source_id),
            "text": text,
            "highlights": highlights,
        }
    equation = manifest.equations.get(source_id)
    if equation is not None:
        return {
            "source": source_id,
            "kind": "equation",
            "page": manifest.source_page(source_id),
            "text": equation["body"].strip(),
            "highlights": _symbol_highlights(manifest, source_id, key)
            if kind == "symbol"
            else [],
        }
    return {
        "source": source_id,
        "kind": "unknown",
        "page": None,
        "text": "",
        "highlights": [],
    }


def _entity_lists(manifest: PaperManifest, entity: dict, kind: str) -> list[dict]:
    eid = entity["id"]
    if kind == "definitions":
        records = [
            r
            for r in manifest.definitions_for(eid)
            if r["kind"] in ("prose", "abbreviation")
        ]
        return [
            dict(_excerpt(manifest, entity, r["source"]), definiens=r["definiens"])
            for r in records
        ]
    if kind == "formulae":
        records = [r for r in manifest.definitions_for(eid) if r["kind"] == "formula"]
        return [
            dict(_excerpt(manifest, entity, r["source"]), definiens=r["definiens"])
            for r in records
        ]
    if kind == "usages":
        return [
            _excerpt(manifest, entity, sid)
            for sid in manifest.usage_for(eid)["sentences"]
        ]
    raise ServeError(404, "unknown_list", f"no list kind {kind!r}")


def create_app(store: PaperStore) -> FastAPI:
    app = FastAPI(title="papergloss annotation service", docs_url=None, redoc_url=None)

    @app.exception_handler(ServeError)
    async def serve_error_handler(request: Request, exc: ServeError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message},
        )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={"code": "invalid_request", "message": str(exc.errors()[:1])},
        )

    def entity_or_404(manifest: PaperManifest, eid: str) -> dict:
        entity = manifest.entities.get(eid)
        if entity is None:
            raise ServeError(404, "unknown_entity", f"no entity {eid!r}")
        return entity

    @app.get("/v1/papers/{pid}/entities")
    def get_entities(pid: str):
        manifest, marked = store.get(pid)
        return {"paper": pid, "entities": _entity_payload(manifest, marked)}

    @app.get("/v1/papers/{pid}/entities/{eid}/definition")
    def get_definition(pid: str, eid: str, pos: int = 0):
        manifest, _ = store.get(pid)
        entity_or_404(manifest, eid)
        view = select_definition(manifest, eid, pos)
        return dict(view.to_json(), paper=pid, entity=eid, position=pos)

    @app.get("/v1/papers/{pid}/entities/{eid}/lists/{kind}")
    def get_lists(pid: str, eid: str, kind: str):
        manifest, _ = store.get(pid)
        entity = entity_or_404(manifest, eid)
        return {
            "paper": pid,
            "entity": eid,
            "kind": kind,
            "items": _entity_lists(manifest, entity, kind),
        }

    @app.get("/v1/papers/{pid}/equations/{qid}/diagram")
    def get_diagram(pid: str, qid: str):
        manifest, _ = store.get(pid)
        if qid not in manifest.equations:
            raise ServeError(404, "unknown_equation", f"no equation {qid!r}")
        try:
            plan = plan_diagram(manifest, qid)
        except UnlocalizedEquation:
            raise ServeError(
                409, "unlocalized_equation", f"equation {qid!r} has no boxes"
            )
        return dict(plan.to_json(), paper=pid)

    @app.get("/v1/papers/{pid}/glossary")
    def get_glossary(pid: str):
        manifest, _ = store.get(pid)
        return {"paper": pid, "entries": build_glossary(manifest)}

    @app.get("/v1/papers/{pid}/declutter/{eid}")
    def get_declutter(pid: str, eid: str):
        manifest, _ = store.get(pid)
        entity = entity_or_404(manifest, eid)
        regions = declutter_regions(manifest, eid)
        return {
            "paper": pid,
            "entity": eid,
            "localized": bool(entity.get("localized")),
            "regions": regions,
        }

    return app


def serve_manifest(manifest_path, paper_id: str = "paper", host="127.0.0.1", port=8077):
    """Convenience used by the CLI's --serve flag."""
    import uvicorn

    store = PaperStore()
    store.add(paper_id, manifest_path)
    app = create_app(store)
    uvicorn.run(app, host=host, port=port, log_level="warning")
