"""HTTP JSON service exposing the query and search pipeline."""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .config import Settings, default_settings
from .content import FixturePageSource, HttpPageSource, PageCache, PageSource
from .errors import AllProvidersFailed, EmptyTokenSet, MalformedTrace, SurfError
from .pipeline import execute_search, recommend_queries
from .query import Query
from .rank import effective_weights
from .search import (
    ResponseCache,
    SearchProvider,
    build_provider,
    providers_from_fixtures,
)


class QueriesBody(BaseModel):
    trace_text: str | None = None
    context_code: str | None = None


class SearchBody(BaseModel):
    query: str | None = None
    trace_text: str | None = None
    context_code: str | None = None
    associate_context: bool = True
    weights: list[float] | None = None


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def build_providers(settings: Settings) -> list[SearchProvider]:
    if settings.providers:
        return [
            build_provider(cfg, fixtures_dir=settings.fixtures_dir or None)
            for cfg in settings.providers
        ]
    if settings.fixtures_dir:
        return providers_from_fixtures(
            settings.fixtures_dir, limit=settings.per_provider_limit
        )
    return []


def create_app(
    settings: Settings | None = None,
    providers: list[SearchProvider] | None = None,
    page_source: PageSource | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    """Assemble the service; every dependency can be injected for tests."""
    settings = settings or default_settings()
    if providers is None:
        providers = build_providers(settings)
    if page_source is None:
        cache = PageCache(settings.cache_dir) if settings.cache_dir else None
        page_source = HttpPageSource(cache=cache)

    app = FastAPI(title="surf", docs_url=None, redoc_url=None)
    app.state.settings = settings
    app.state.providers = providers
    app.state.page_source = page_source
    app.state.response_cache = ResponseCache()
    app.state.watch_lock = threading.Lock()
    app.state.latest_watch_event = None

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request: Request, exc: RequestValidationError):
        return _error(400, "invalid request body")

    @app.get("/health")
    async def health():
        # Async on purpose: stays on the event loop, so a slow search
        # running in the worker pool cannot block it.
        return {"status": "ok"}

    @app.post("/api/queries")
    def api_queries(body: QueriesBody):
        if not body.trace_text or not body.trace_text.strip():
            return _error(400, "trace_text is required")
        try:
            rec = recommend_queries(body.trace_text, body.context_code or "")
        except MalformedTrace as exc:
            return _error(400, str(exc))
        except EmptyTokenSet as exc:
            return _error(422, str(exc))
        return {
            "queries": [
                {
                    "text": q.text,
                    "score": round(q.score, 6),
                    "tokens": list(q.tokens),
                }
                for q in rec.queries
            ],
            "graph_dot": rec.graph_dot,
        }

    @app.post("/api/search")
    def api_search(body: SearchBody):
        if not (body.query and body.query.strip()) and not (
            body.trace_text and body.trace_text.strip()
        ):
            return _error(400, "one of query or trace_text is required")

        weights = settings.rank_weights
        if body.weights is not None:
            weights = tuple(body.weights)
            try:
                effective_weights(weights, True)
            except ValueError as exc:
                return _error(400, str(exc))

        trace = None
        context_code = None
        query: Query | None = None
        try:
            if body.trace_text and body.trace_text.strip():
                rec = recommend_queries(body.trace_text, body.context_code or "")
                trace = rec.trace
                context_code = rec.context_code
                query = rec.queries[0]
            elif body.context_code and body.context_code.strip():
                from .trace import tokenize_code

                context_code = tokenize_code(body.context_code)
            if body.query and body.query.strip():
                query = Query.keyword(body.query)
            assert query is not None
            outcome = execute_search(
                query,
                providers,
                trace=trace,
                context_code=context_code,
                associate_context=body.associate_context,
                weights=weights,
                top_n=settings.top_results,
                corpus_cap=settings.corpus_cap,
                page_source=page_source,
                response_cache=app.state.response_cache,
            )
        except MalformedTrace as exc:
            return _error(400, str(exc))
        except EmptyTokenSet as exc:
            return _error(422, str(exc))
        except AllProvidersFailed as exc:
            return _error(502, str(exc))
        except SurfError as exc:
            return _error(502, str(exc))
        return outcome.to_dict()

    @app.get("/api/watch/latest")
    def watch_latest():
        with app.state.watch_lock:
            event = app.state.latest_watch_event
        return {"event": event}

    if ui_dir and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def publish_watch_event(app: FastAPI, event_dict: dict) -> None:
    """Called by watch mode running next to the service."""
    with app.state.watch_lock:
        app.state.latest_watch_event = event_dict


def serve(
    app: FastAPI,
    host: str,
    port: int,
) -> None:
    import uvicorn

    uvicorn.run(app, host=host, port=port, log_level="info")
