"""HTTP JSON facade.

Endpoints::

    POST /update          JSON array of documents, committed all-or-nothing
    POST /traverse        traversal request -> traversal response
    POST /snapshot/save   {"path": ...} relative to the data directory
    POST /snapshot/load   {"path": ...}
    GET  /schema
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.concurrency import run_in_threadpool
from fastapi.responses import JSONResponse

from .analysis import Schema
from .engine import KnowledgeGraph
from .errors import (
    DocumentError,
    QuerySyntaxError,
    RequestError,
    SchemaError,
    ScoringError,
    SnapshotFormatError,
)
from .index import Document
from .scoring import ScorerKind
from .traversal import DEFAULT_DEPTH_CAP, TraversalRequest

logger = logging.getLogger(__name__)


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8983
    data_dir: Path = Path("skg-data")
    schema_file: Path | None = None
    depth_cap: int = DEFAULT_DEPTH_CAP
    default_scorer: ScorerKind = ScorerKind.RELATEDNESS

    def __post_init__(self):
        self.data_dir = Path(self.data_dir)
        if self.depth_cap < 1:
            raise ValueError("depth cap must be >= 1")
        self.default_scorer = ScorerKind(self.default_scorer)

    def load_schema(self) -> Schema | None:
        if self.schema_file is None:
            return None
        return Schema.from_dict(json.loads(Path(self.schema_file).read_text()))


def _error(status: int, message: str, **extra) -> JSONResponse:
    return JSONResponse({"error": message, **extra}, status_code=status)


def _validate_batch(kg: KnowledgeGraph, body) -> tuple[list[Document], list[dict]]:
    """Parse and check every document so the client sees all problems at once."""
    if not isinstance(body, list):
        return [], [{"index": None, "error": "body must be a JSON array of documents"}]
    snapshot = kg.snapshot
    schema = kg.schema.copy()
    known = set(snapshot.external_ids)
    docs, errors, seen = [], [], set()
    for i, raw in enumerate(body):
        doc_id = raw.get("id") if isinstance(raw, dict) else None
        try:
            doc = Document.from_json(raw)
            if doc.id in known or doc.id in seen:
                raise DocumentError(f"duplicate document id {doc.id!r}")
            for name, value in doc.fields.items():
                schema.resolve(name, value)
        except (DocumentError, SchemaError) as exc:
            errors.append({"index": i, "id": doc_id, "error": str(exc)})
            continue
        seen.add(doc.id)
        docs.append(doc)
    return docs, errors


def create_app(config: ServiceConfig | None = None, kg: KnowledgeGraph | None = None) -> FastAPI:
    config = config or ServiceConfig()
    if kg is None:
        kg = KnowledgeGraph(config.load_schema(), config.depth_cap, config.default_scorer)
    app = FastAPI(title="skg")
    app.state.kg = kg
    app.state.config = config

    async def read_json(request: Request):
        raw = await request.body()
        try:
            return json.loads(raw or b"null")
        except json.JSONDecodeError as exc:
            raise RequestError(f"invalid JSON: {exc}") from exc

    def resolve_path(body) -> Path:
        if not isinstance(body, dict) or not isinstance(body.get("path"), str):
            raise RequestError("body must be {\"path\": <string>}")
        p = Path(body["path"])
        return p if p.is_absolute() else config.data_dir / p

    @app.exception_handler(RequestError)
    async def _request_error(request, exc):
        return _error(400, str(exc))

    @app.post("/update")
    async def update(request: Request):
        body = await read_json(request)
        docs, errors = _validate_batch(kg, body)
        if errors:
            return JSONResponse({"indexed": 0, "errors": errors}, status_code=400)
        try:
            count = await run_in_threadpool(kg.update, docs)
        except (DocumentError, SchemaError) as exc:
            return JSONResponse({"indexed": 0, "errors": [{"index": None, "error": str(exc)}]},
                                status_code=400)
        return {"indexed": count}

    @app.post("/traverse")
    async def traverse(request: Request):
        body = await read_json(request)
        try:
            req = TraversalRequest.from_json(body, config.default_scorer)
            response = await run_in_threadpool(kg.traverse, req)
        except SchemaError as exc:
            return _error(422, str(exc))
        except (QuerySyntaxError, RequestError, ScoringError, ValueError) as exc:
            return _error(400, str(exc))
        return response.to_json()

    @app.post("/snapshot/save")
    async def save(request: Request):
        path = resolve_path(await read_json(request))
        snap = kg.snapshot
        await run_in_threadpool(kg.save, path)
        return {"saved": str(path), "doc_count": snap.doc_count}

    @app.post("/snapshot/load")
    async def load(request: Request):
        path = resolve_path(await read_json(request))
        if not path.exists():
            return _error(404, f"no snapshot at {path}")
        try:
            snap = await run_in_threadpool(kg.load, path)
        except SnapshotFormatError as exc:
            return _error(400, str(exc))
        return {"loaded": str(path), "doc_count": snap.doc_count}

    @app.get("/schema")
    async def schema():
        snap = kg.snapshot
        return {**snap.schema.to_dict(), "doc_count": snap.doc_count}

    return app


def serve(config: ServiceConfig) -> None:
    import uvicorn

    config.data_dir.mkdir(parents=True, exist_ok=True)
    uvicorn.run(create_app(config), host=config.host, port=config.port)
