"""HTTP API over a single engine instance.

Mutations are serialized through the engine's event log (FastAPI runs these
sync handlers in a worker thread pool; the engine lock keeps appends
single-writer).  Retried mutations can carry an Idempotency-Key header; a
replay returns the cached response instead of re-applying the request.
"""

from __future__ import annotations

import io
import threading
from typing import Optional

from fastapi import Depends, FastAPI, HTTPException, Request, Response
from fastapi.responses import HTMLResponse, JSONResponse
from starlette.middleware.base import BaseHTTPMiddleware

from .annotation import AnnotationRecord
from .engine import Engine
from .errors import (
    ConflictError,
    DistressGraphError,
    EdgeKindError,
    IngestIOError,
    NotFoundError,
    ParseError,
    PolicyError,
    ProposerError,
    StateError,
    ValidationError,
)
from .graph import Provenance
from .metrics import (
    RETAINED_STATUSES,
    connectivity_metrics,
    edge_key,
    efficiency_report,
    semantic_coherence,
)
from .events import EventKind
from .simulate import SimulationConfig, run_simulation
from .fixtures import simulation_fixture
from .workflow import ValidatorRole

_STATUS_BY_ERROR = (
    (NotFoundError, 404),
    ((StateError, ConflictError), 409),
    (
        (
            ValidationError,
            PolicyError,
            EdgeKindError,
            ParseError,
            ProposerError,
            IngestIOError,
        ),
        400,
    ),
)

_PROPOSE_PARAMS = {
    "language",
    "lang_a",
    "lang_b",
    "node_id",
    "k",
    "tau",
    "commit",
    "enqueue",
}


def _status_for(exc: DistressGraphError) -> int:
    for types, status in _STATUS_BY_ERROR:
        if isinstance(exc, types):
            return status
    return 400


class IdempotencyMiddleware(BaseHTTPMiddleware):
    """Replays the stored response for a repeated (method, path, key)."""

    def __init__(self, app, cache: dict):
        super().__init__(app)
        self.cache = cache

    async def dispatch(self, request, call_next):
        key = request.headers.get("idempotency-key")
        if not key or request.method != "POST":
            return await call_next(request)
        cache_key = (request.method, request.url.path, key)
        if cache_key in self.cache:
            status, body, media_type = self.cache[cache_key]
            return Response(
                content=body,
                status_code=status,
                media_type=media_type,
                headers={"x-idempotent-replay": "true"},
            )
        response = await call_next(request)
        body = b"".join([chunk async for chunk in response.body_iterator])
        if 200 <= response.status_code < 300:
            self.cache[cache_key] = (response.status_code, body, response.media_type)
        return Response(
            content=body,
            status_code=response.status_code,
            media_type=response.media_type,
        )


async def _json_body(request: Request) -> dict:
    try:
        data = await request.json()
    except Exception as exc:
        raise ParseError(f"request body is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationError("request body must be a JSON object")
    return data


def create_app(engine: Engine, auth_tokens: Optional[dict] = None) -> FastAPI:
    app = FastAPI(title="distressgraph", docs_url=None, redoc_url=None)
    app.add_middleware(IdempotencyMiddleware, cache={})
    tokens = dict(auth_tokens or {})
    lock = threading.Lock()

    async def authenticated(request: Request) -> Optional[str]:
        """Resolves the calling validator id; None when auth is disabled."""
        if not tokens:
            return None
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise HTTPException(status_code=401, detail="missing bearer token")
        token = header[7:].strip()
        if token not in tokens:
            raise HTTPException(status_code=401, detail="unknown token")
        return tokens[token]

    @app.exception_handler(DistressGraphError)
    async def on_domain_error(request: Request, exc: DistressGraphError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.get("/health")
    def health():
        return {"status": "ok", **engine.summary()}

    @app.get("/metrics")
    def metrics(caller: Optional[str] = Depends(authenticated)):
        graph_metrics = connectivity_metrics(engine.graph)
        decisions_used = sum(
            1
            for r in engine.log.records
            if r.kind
            in (EventKind.DECISION_SUBMITTED, EventKind.ADJUDICATION_RESOLVED)
        )
        accepted = [
            edge_key(e)
            for e in engine.graph.edges()
            if e.status in RETAINED_STATUSES
        ]
        return {
            "graph": graph_metrics.to_dict(),
            "semantic_coherence": semantic_coherence(
                engine.graph, engine.store, engine.alignment.provider_id
            ),
            "efficiency": efficiency_report(decisions_used, accepted).to_dict(),
        }

    @app.get("/graph/export")
    def graph_export(caller: Optional[str] = Depends(authenticated)):
        return Response(content=engine.export_bytes(), media_type="application/json")

    @app.post("/graph/import")
    async def graph_import(
        request: Request, caller: Optional[str] = Depends(authenticated)
    ):
        doc = await _json_body(request)
        with lock:
            return engine.import_document(doc)

    @app.post("/corpus/ingest")
    async def corpus_ingest(
        request: Request, caller: Optional[str] = Depends(authenticated)
    ):
        raw = await request.body()
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"body is not UTF-8: {exc}") from exc
        with lock:
            report = engine.ingest_corpus(io.StringIO(text))
        return report.to_dict()

    @app.post("/expressions/align")
    async def expressions_align(
        request: Request, caller: Optional[str] = Depends(authenticated)
    ):
        body = await _json_body(request)
        if "surface_text" not in body or "language" not in body:
            raise ValidationError("alignment needs surface_text and language")
        annotation = (
            AnnotationRecord.from_dict(body["annotation"])
            if body.get("annotation")
            else None
        )
        provenance = (
            Provenance.from_dict(body["provenance"])
            if body.get("provenance")
            else None
        )
        with lock:
            result = engine.align_expression(
                surface_text=body["surface_text"],
                language=body["language"],
                annotation=annotation,
                provenance=provenance,
                gloss=body.get("gloss"),
                tau_align=body.get("tau_align"),
            )
        return result.to_dict()

    @app.post("/candidates/propose")
    async def candidates_propose(
        request: Request, caller: Optional[str] = Depends(authenticated)
    ):
        body = await _json_body(request)
        mode = body.get("mode")
        if not mode:
            raise ValidationError("propose needs a mode")
        params = body.get("params") or {}
        if not isinstance(params, dict):
            raise ValidationError("params must be an object")
        unknown = sorted(set(params) - _PROPOSE_PARAMS)
        if unknown:
            raise ValidationError(f"unknown proposal parameter {unknown[0]!r}")
        with lock:
            return engine.propose(mode, **params)

    @app.get("/queue")
    def queue(
        role: str,
        batch_size: int = 10,
        caller: Optional[str] = Depends(authenticated),
    ):
        try:
            role_value = ValidatorRole(role)
        except ValueError as exc:
            raise ValidationError(f"unknown role {role!r}") from exc
        items = engine.next_batch(role_value, batch_size)
        enriched = []
        for item in items:
            edge = engine.graph.edge(item.edge_id)
            src = engine.graph.node(edge.src)
            dst = engine.graph.node(edge.dst)
            enriched.append(
                {
                    "edge_id": item.edge_id,
                    "priority": item.priority,
                    "batch_key": item.batch_key,
                    "enqueued_at": item.enqueued_at,
                    "edge": edge.to_dict(),
                    "src_display": getattr(src, "surface_text", None)
                    or getattr(src, "label", ""),
                    "dst_display": getattr(dst, "surface_text", None)
                    or getattr(dst, "label", ""),
                    "bundle": engine.preview_bundle(item.edge_id).to_dict(),
                }
            )
        return {"role": role_value.value, "items": enriched}

    @app.post("/decisions")
    async def decisions(
        request: Request, caller: Optional[str] = Depends(authenticated)
    ):
        body = await _json_body(request)
        if caller is not None and body.get("validator_id") != caller:
            raise HTTPException(
                status_code=403,
                detail="validator_id does not match the presented token",
            )
        update_thresholds = bool(body.pop("update_thresholds", False))
        with lock:
            outcome = engine.submit_decision(body)
            tau = (
                engine.update_thresholds()
                if update_thresholds and outcome.aggregated
                else engine.config.tau
            )
        return {
            "edge": outcome.edge.to_dict(),
            "aggregated": outcome.aggregated,
            "revised_edge": outcome.revised_edge.to_dict()
            if outcome.revised_edge
            else None,
            "tau": tau,
        }

    @app.post("/adjudications/{edge_id}")
    async def adjudications(
        edge_id: str, request: Request, caller: Optional[str] = Depends(authenticated)
    ):
        body = await _json_body(request)
        if "outcome" not in body:
            raise ValidationError("adjudication needs an outcome")
        with lock:
            settled = engine.resolve_adjudication(
                edge_id,
                body["outcome"],
                parallel_edges=body.get("parallel_edges"),
                reasons=body.get("reasons"),
                note=body.get("note", ""),
            )
        return {"edges": [e.to_dict() for e in settled]}

    @app.get("/edges/{edge_id}")
    def edge_detail(edge_id: str, caller: Optional[str] = Depends(authenticated)):
        edge = engine.graph.edge(edge_id)
        src = engine.graph.node(edge.src)
        dst = engine.graph.node(edge.dst)
        return {
            "edge": edge.to_dict(),
            "src_display": getattr(src, "surface_text", None)
            or getattr(src, "label", ""),
            "dst_display": getattr(dst, "surface_text", None)
            or getattr(dst, "label", ""),
            "decisions": [
                d.to_dict() for d in engine.workflow.decisions_for(edge_id)
            ],
        }

    @app.get("/edges/{edge_id}/explanation")
    def edge_explanation(edge_id: str, caller: Optional[str] = Depends(authenticated)):
        with lock:
            bundle = engine.generate_bundle(edge_id)
        return bundle.to_dict()

    @app.get("/edges/{edge_id}/report")
    def edge_report(edge_id: str, caller: Optional[str] = Depends(authenticated)):
        with lock:
            html = engine.report(edge_id, html=True)
        return HTMLResponse(content=html)

    @app.post("/simulate")
    async def simulate(
        request: Request, caller: Optional[str] = Depends(authenticated)
    ):
        body = await _json_body(request)
        doc, candidates, true_keys = simulation_fixture()
        if not body.get("true_edge_keys"):
            body = dict(body, true_edge_keys=sorted(true_keys))
        config = SimulationConfig.from_dict(body)
        run = run_simulation(config, candidates, doc)
        return {
            "config": config.to_dict(),
            "report": run.report.to_dict(),
            "curve": [[d, f1] for d, f1 in run.curve],
        }

    return app


__all__ = ["IdempotencyMiddleware", "create_app"]
