"""HTTP service: wire contracts, error mapping, responsiveness, UI mount."""

from __future__ import annotations

import json
import threading
import time

import pytest
from fastapi.testclient import TestClient

from surf.config import Settings
from surf.content import FixturePageSource
from surf.search import ProviderConfig, ProviderHit, SearchProvider, providers_from_fixtures
from surf.service import create_app, publish_watch_event

EXC = "ConcurrentModificationException"


@pytest.fixture()
def scenario_inputs(cme_scenario_dir):
    return {
        "trace_text": (cme_scenario_dir / "trace.txt").read_text(encoding="utf-8"),
        "context_code": (cme_scenario_dir / "context.java").read_text(encoding="utf-8"),
    }


@pytest.fixture()
def client(cme_scenario_dir):
    app = create_app(
        settings=Settings(),
        providers=providers_from_fixtures(cme_scenario_dir / "providers"),
        page_source=FixturePageSource.from_json_file(cme_scenario_dir / "pages.json"),
    )
    with TestClient(app) as test_client:
        yield test_client


# ── health ───────────────────────────────────────────────────────────────────

def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


# ── /api/queries ─────────────────────────────────────────────────────────────

def test_queries_endpoint_matches_golden(client, scenario_inputs, cme_scenario_dir):
    response = client.post("/api/queries", json=scenario_inputs)
    assert response.status_code == 200
    golden = json.loads(
        (cme_scenario_dir / "golden_queries_response.json").read_text(encoding="utf-8")
    )
    assert response.json() == golden


def test_queries_wire_contract(client, scenario_inputs):
    body = client.post("/api/queries", json=scenario_inputs).json()
    assert set(body) == {"queries", "graph_dot"}
    assert len(body["queries"]) == 5
    for entry in body["queries"]:
        assert set(entry) == {"text", "score", "tokens"}
        assert entry["text"] == " ".join(entry["tokens"])
        assert 0.0 <= entry["score"] <= 1.0
    assert body["queries"][0]["text"] == f"{EXC} ArrayList Itr checkForComodification"
    assert body["graph_dot"].startswith("digraph token_graph {")


def test_queries_without_code_context(client, scenario_inputs):
    body = client.post(
        "/api/queries", json={"trace_text": scenario_inputs["trace_text"]}
    ).json()
    assert body["queries"][0]["text"] == f"Itr checkForComodification {EXC}"


def test_queries_missing_or_blank_trace(client):
    for payload in ({}, {"trace_text": ""}, {"trace_text": "   \n"}):
        response = client.post("/api/queries", json=payload)
        assert response.status_code == 400
        assert "error" in response.json()


def test_queries_unparseable_trace_is_400(client):
    response = client.post("/api/queries", json={"trace_text": "just some words"})
    assert response.status_code == 400


def test_queries_token_free_trace_is_422(client):
    response = client.post(
        "/api/queries", json={"trace_text": "a.bc: boom\n\tat a.bc.de(x.java:1)\n"}
    )
    assert response.status_code == 422
    assert "error" in response.json()


def test_malformed_request_body_is_400(client):
    response = client.post(
        "/api/queries", content="{ not json",
        headers={"Content-Type": "application/json"},
    )
    assert response.status_code == 400
    assert response.json() == {"error": "invalid request body"}
    assert client.post("/api/queries", json={"trace_text": 5}).status_code == 400


# ── /api/search ──────────────────────────────────────────────────────────────

def test_search_endpoint_matches_golden(client, scenario_inputs, cme_scenario_dir):
    response = client.post("/api/search", json=scenario_inputs)
    assert response.status_code == 200
    golden = json.loads(
        (cme_scenario_dir / "golden_search_response.json").read_text(encoding="utf-8")
    )
    assert response.json() == golden


def test_search_wire_contract(client, scenario_inputs):
    body = client.post("/api/search", json=scenario_inputs).json()
    assert set(body) == {"results", "warnings"}
    assert body["warnings"] == []
    assert len(body["results"]) == 30
    assert [r["rank"] for r in body["results"]] == list(range(1, 31))
    for row in body["results"]:
        assert set(row) == {
            "url", "title", "rank", "content_relevance", "context_relevance",
            "engine_confidence", "popularity", "final_score", "providers",
        }
        for metric in ("content_relevance", "context_relevance",
                       "engine_confidence", "popularity", "final_score"):
            assert 0.0 <= row[metric] <= 1.0
        assert row["providers"] == sorted(row["providers"])


def test_search_is_deterministic(client, scenario_inputs):
    first = client.post("/api/search", json=scenario_inputs).content
    second = client.post("/api/search", json=scenario_inputs).content
    assert first == second


def test_search_keyword_only_has_no_context_signal(client):
    body = client.post(
        "/api/search", json={"query": f"{EXC} ArrayList Itr next"}
    ).json()
    assert all(r["context_relevance"] == 0.0 for r in body["results"])


def test_search_context_toggle(client, scenario_inputs):
    on = client.post("/api/search", json=scenario_inputs).json()
    off = client.post(
        "/api/search", json={**scenario_inputs, "associate_context": False}
    ).json()
    assert any(r["context_relevance"] > 0.0 for r in on["results"])
    assert all(r["context_relevance"] == 0.0 for r in off["results"])
    assert [r["url"] for r in on["results"][:3]] != [r["url"] for r in off["results"][:3]]


def test_search_explicit_query_overrides_recommendation(client, scenario_inputs):
    body = client.post(
        "/api/search",
        json={**scenario_inputs, "query": "completely different words"},
    ).json()
    assert len(body["results"]) == 30
    # context still applies because the trace is present
    assert any(r["context_relevance"] > 0.0 for r in body["results"])


def test_search_weight_override(client, scenario_inputs):
    body = client.post(
        "/api/search", json={**scenario_inputs, "weights": [1.0, 0.0, 0.0, 0.0]}
    ).json()
    for row in body["results"]:
        assert row["final_score"] == pytest.approx(row["content_relevance"], abs=1e-6)


def test_search_invalid_weights_rejected(client, scenario_inputs):
    for bad in ([0.5, 0.5], [0.5, 0.5, 0.5, 0.5], [-0.1, 0.4, 0.4, 0.3]):
        response = client.post(
            "/api/search", json={**scenario_inputs, "weights": bad}
        )
        assert response.status_code == 400


def test_search_requires_query_or_trace(client):
    response = client.post("/api/search", json={})
    assert response.status_code == 400
    assert "error" in response.json()


def test_search_token_free_trace_is_422(client):
    response = client.post(
        "/api/search", json={"trace_text": "a.bc: boom\n\tat a.bc.de(x.java:1)\n"}
    )
    assert response.status_code == 422


def test_search_all_providers_down_is_502(cme_scenario_dir):
    providers = providers_from_fixtures(cme_scenario_dir / "providers")
    for provider in providers:
        provider.config.enabled = False
    app = create_app(settings=Settings(), providers=providers,
                     page_source=FixturePageSource({}))
    with TestClient(app) as client:
        response = client.post("/api/search", json={"query": "anything"})
    assert response.status_code == 502
    assert "error" in response.json()


# ── /api/watch/latest ────────────────────────────────────────────────────────

def test_watch_latest_empty_then_published(client):
    assert client.get("/api/watch/latest").json() == {"event": None}
    event = {"exception": "java.lang.RuntimeException", "query": {"text": "q"}}
    publish_watch_event(client.app, event)
    assert client.get("/api/watch/latest").json() == {"event": event}


# ── responsiveness ───────────────────────────────────────────────────────────

class SlowProvider(SearchProvider):
    def __init__(self, delay_s):
        super().__init__(ProviderConfig(provider_id="slow"))
        self.delay_s = delay_s

    def _search(self, query_text):
        time.sleep(self.delay_s)
        return [ProviderHit(provider_id="slow", url="https://e.com/1", title="t",
                            snippet="", provider_rank=1)]


def test_health_stays_responsive_during_slow_search():
    app = create_app(settings=Settings(), providers=[SlowProvider(1.2)],
                     page_source=FixturePageSource({}))
    with TestClient(app) as client:
        statuses = {}

        def run_search():
            statuses["search"] = client.post(
                "/api/search", json={"query": "q"}
            ).status_code

        worker = threading.Thread(target=run_search)
        worker.start()
        time.sleep(0.2)  # let the search enter the provider sleep
        started = time.monotonic()
        health = client.get("/health")
        elapsed = time.monotonic() - started
        worker.join()
    assert health.status_code == 200
    assert elapsed < 1.0
    assert statuses["search"] == 200


# ── static UI mount ──────────────────────────────────────────────────────────

def test_ui_mount_serves_files_and_keeps_api(tmp_path, cme_scenario_dir, scenario_inputs):
    (tmp_path / "index.html").write_text("<title>surf ui</title>", encoding="utf-8")
    app = create_app(
        settings=Settings(),
        providers=providers_from_fixtures(cme_scenario_dir / "providers"),
        page_source=FixturePageSource.from_json_file(cme_scenario_dir / "pages.json"),
        ui_dir=tmp_path,
    )
    with TestClient(app) as client:
        index = client.get("/")
        assert index.status_code == 200
        assert "surf ui" in index.text
        api = client.post("/api/queries", json=scenario_inputs)
        assert api.status_code == 200


def test_no_ui_mount_without_directory(client):
    assert client.get("/").status_code == 404
