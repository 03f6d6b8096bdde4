"""Read-only HTTP API over a loaded engine, plus static hosting for the UI.

Every error leaves the service as the one JSON envelope
``{"code": ..., "message": ..., "detail": ...}`` — unknown resources as 404,
bad requests (malformed bodies, unknown concepts, empty queries) as 400.
Ranking is exactly the library's: the endpoint serializes what
:func:`segsearch.search.search` returns, nothing re-scored, so CLI and API
agree result for result.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .annotations import PobKind, SegmentRef, format_time
from .engine import SearchEngine
from .errors import (
    DomainMismatchError,
    QueryError,
    SegSearchError,
    UnknownConceptError,
)
from .ontology import RelationKind, concept_tree, tree_to_dict
from .search import breakdown_to_dict, explain, make_query, result_to_dict, search

log = logging.getLogger(__name__)


class SearchRequest(BaseModel):
    domain_id: str
    concepts: list[str]
    pob: str | None = None
    expand: list[str] = Field(default_factory=list)
    top: int | None = None


def _error(status: int, code: str, message: str, detail: Any = None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "detail": detail},
    )


def create_app(engine: SearchEngine, *, static_dir: str | Path | None = None) -> FastAPI:
    """Build the FastAPI application around one immutable engine."""
    app = FastAPI(title="segsearch", docs_url=None, redoc_url=None, openapi_url=None)

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return _error(400, "bad-request", "request body does not match the schema",
                      detail=exc.errors())

    @app.exception_handler(SegSearchError)
    async def on_engine_error(request: Request, exc: SegSearchError):
        if isinstance(exc, DomainMismatchError):
            return _error(404, "unknown-domain", str(exc))
        if isinstance(exc, UnknownConceptError):
            return _error(400, "unknown-concept", str(exc))
        if isinstance(exc, QueryError):
            return _error(400, "bad-query", str(exc))
        log.exception("engine error while serving %s", request.url.path)
        return _error(400, "engine-error", str(exc))

    @app.get("/api/domains")
    async def list_domains() -> Any:
        domains = sorted(
            engine.ontologies.values(), key=lambda o: (o.label, o.domain_id)
        )
        return {
            "domains": [
                {
                    "domain_id": o.domain_id,
                    "label": o.label,
                    "concept_count": len(o.concepts),
                }
                for o in domains
            ]
        }

    @app.get("/api/domains/{domain_id}/tree")
    async def domain_tree(domain_id: str) -> Any:
        ontology = engine.ontologies.get(domain_id)
        if ontology is None:
            return _error(404, "unknown-domain", f"no domain '{domain_id}' is loaded")
        return {
            "domain_id": domain_id,
            "label": ontology.label,
            "roots": [tree_to_dict(n) for n in concept_tree(ontology)],
        }

    @app.post("/api/search")
    async def run_search(request: SearchRequest) -> Any:
        facts = engine.facts.get(request.domain_id)
        if facts is None:
            return _error(
                404, "unknown-domain", f"no domain '{request.domain_id}' is loaded"
            )
        try:
            pob = PobKind(request.pob) if request.pob is not None else None
        except ValueError:
            return _error(
                400, "bad-query",
                f"unknown POB kind '{request.pob}' "
                f"(expected one of {[k.value for k in PobKind]})",
            )
        try:
            expand = [RelationKind(k) for k in request.expand]
        except ValueError:
            return _error(
                400, "bad-query",
                f"unknown relation kind in expand "
                f"(expected among {[k.value for k in RelationKind]})",
            )
        query = make_query(
            request.domain_id,
            request.concepts,
            facts,
            pob_filter=pob,
            max_results=request.top,
            expand=expand,
        )
        results = search(
            query,
            engine.index,
            engine.corpus,
            ontology=engine.ontologies[request.domain_id],
            facts=facts,
        )
        return {"results": [result_to_dict(r) for r in results]}

    @app.get("/api/segments/{lesson_id}/{segment_id}")
    async def segment_detail(lesson_id: str, segment_id: str,
                             explain: str | None = None) -> Any:
        # ?explain=a,b,c — query-style concept list for a score breakdown.
        concepts_param = explain
        try:
            lesson = engine.corpus.lesson(lesson_id)
            segment = engine.corpus.segment(SegmentRef(lesson_id, segment_id))
        except KeyError:
            return _error(
                404, "unknown-segment", f"no segment '{lesson_id}/{segment_id}'"
            )
        domain_id = engine.corpus.lesson_domain(lesson_id)
        ontology = engine.ontologies[domain_id]
        payload: dict[str, Any] = {
            "lesson_id": lesson_id,
            "segment_id": segment_id,
            "domain_id": domain_id,
            "lesson_title": lesson.title,
            "title": segment.title,
            "begin": format_time(segment.begin),
            "duration": format_time(segment.duration),
            "url": lesson.url,
            "language": lesson.language,
            "pobs": [
                {
                    "pob_id": pob.pob_id,
                    "kind": pob.kind.value,
                    "concerns": list(pob.concerns),
                    "concepts": [
                        ontology.concepts.get(c, c) for c in pob.concerns
                    ],
                    **({"comment": pob.comment} if pob.comment is not None else {}),
                }
                for pob in segment.pobs
            ],
        }
        if concepts_param:
            facts = engine.facts[domain_id]
            query = make_query(
                domain_id, concepts_param.split(","), facts
            )
            breakdown = _explain(query, lesson_id, segment_id, engine)
            payload["explain"] = breakdown
        return payload

    if static_dir is not None:
        static_dir = Path(static_dir)
        if static_dir.is_dir():
            app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
        else:
            log.warning("static directory %s does not exist; UI not mounted", static_dir)

    return app


def _explain(query, lesson_id: str, segment_id: str, engine: SearchEngine) -> dict[str, Any]:
    breakdown = explain(
        query,
        SegmentRef(lesson_id, segment_id),
        engine.index,
        facts=engine.facts.get(query.domain_id),
    )
    return breakdown_to_dict(breakdown)
