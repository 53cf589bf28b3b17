"""Multi-provider search fan-out and corpus assembly.

Three provider kinds are built in: a StackExchange API client, a generic
JSON web-search adapter (endpoint and field mapping are configuration),
and a fixture provider that replays recorded responses for offline runs.
"""

from __future__ import annotations

import hashlib
import html
import json
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import parse_qsl, urlencode, urlsplit, urlunsplit

import httpx

from .errors import AllProvidersFailed, InvalidUrl, ProviderError
from .query import Query

DEFAULT_PER_PROVIDER_LIMIT = 30
DEFAULT_TIMEOUT_MS = 10_000
DEFAULT_CORPUS_CAP = 120
DEFAULT_MAX_WORKERS = 4

_TRACKING_PARAMS = {"gclid", "fbclid", "msclkid"}

STACKEXCHANGE_ENDPOINT = "https://api.stackexchange.com/2.3/search/advanced"


# ── Domain types ─────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class ProviderHit:
    """One result row as a single provider returned it."""

    provider_id: str
    url: str
    title: str
    snippet: str
    provider_rank: int
    provider_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.provider_rank < 1:
            raise ValueError("provider_rank is 1-based")
        if not self.url:
            raise ValueError("hit needs a url")


@dataclass
class CorpusEntry:
    """All provider hits that deduplicate to one canonical URL."""

    canonical_url: str
    hits: list[ProviderHit]
    best_title: str

    @property
    def best_rank(self) -> int:
        return min(h.provider_rank for h in self.hits)

    def vote_score(self) -> int | None:
        """Best Q&A vote count across hits, None when no hit carries one."""
        votes = [h.provider_meta["score"] for h in self.hits if "score" in h.provider_meta]
        return max(votes) if votes else None


@dataclass
class Corpus:
    """Deduplicated result pool for one query, plus fan-out warnings."""

    entries: list[CorpusEntry]
    warnings: list[str] = field(default_factory=list)
    providers_active: int = 1

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class ProviderConfig:
    provider_id: str
    kind: str = "generic"  # stackexchange | generic | fixture
    endpoint: str = ""
    credential_env: str = ""
    per_provider_limit: int = DEFAULT_PER_PROVIDER_LIMIT
    timeout_ms: int = DEFAULT_TIMEOUT_MS
    enabled: bool = True
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.per_provider_limit < 1:
            raise ValueError("per_provider_limit must be >= 1")

    @property
    def timeout_s(self) -> float:
        return self.timeout_ms / 1000.0

    def credential(self) -> str | None:
        return os.environ.get(self.credential_env) if self.credential_env else None


# ── URL canonicalization ─────────────────────────────────────────────────────

def canonicalize_url(url: str) -> str:
    """Normalize a URL for cross-provider deduplication.

    Lowercases scheme and host, strips the fragment and tracking parameters
    (utm_*, gclid, fbclid), drops a trailing slash, and sorts what remains
    of the query string.  Idempotent.
    """
    parts = urlsplit(url.strip())
    if not parts.scheme or not parts.netloc:
        raise InvalidUrl(f"not an absolute URL: {url!r}")

    host = parts.hostname or ""
    netloc = host.lower()
    if parts.port is not None:
        netloc += f":{parts.port}"

    path = parts.path
    if path.endswith("/"):
        path = path.rstrip("/")

    params = [
        (k, v)
        for k, v in parse_qsl(parts.query, keep_blank_values=True)
        if not k.lower().startswith("utm_") and k.lower() not in _TRACKING_PARAMS
    ]
    query = urlencode(sorted(params))
    return urlunsplit((parts.scheme.lower(), netloc, path, query, ""))


def query_fingerprint(query_text: str) -> str:
    """Stable short hash used to name per-query fixture files."""
    return hashlib.sha256(query_text.strip().lower().encode("utf-8")).hexdigest()[:16]


# ── Providers ────────────────────────────────────────────────────────────────

class SearchProvider:
    """Base provider: subclasses implement _search and get error wrapping."""

    def __init__(self, config: ProviderConfig):
        self.config = config

    @property
    def provider_id(self) -> str:
        return self.config.provider_id

    def search(self, query_text: str) -> list[ProviderHit]:
        try:
            hits = self._search(query_text)
        except ProviderError:
            raise
        except Exception as exc:  # noqa: BLE001 - provider faults degrade, not crash
            raise ProviderError(self.provider_id, str(exc)) from exc
        return hits[: self.config.per_provider_limit]

    def _search(self, query_text: str) -> list[ProviderHit]:
        raise NotImplementedError


class StackExchangeProvider(SearchProvider):
    """Live StackExchange search via the public API."""

    def __init__(self, config: ProviderConfig, client: httpx.Client | None = None):
        super().__init__(config)
        self._client = client

    def _search(self, query_text: str) -> list[ProviderHit]:
        params = {
            "q": query_text,
            "site": self.config.options.get("site", "stackoverflow"),
            "order": "desc",
            "sort": "relevance",
            "pagesize": self.config.per_provider_limit,
            "filter": "default",
        }
        key = self.config.credential()
        if key:
            params["key"] = key
        endpoint = self.config.endpoint or STACKEXCHANGE_ENDPOINT

        client = self._client or _default_client()
        response = client.get(endpoint, params=params, timeout=self.config.timeout_s)
        if response.status_code != 200:
            raise ProviderError(self.provider_id, f"HTTP {response.status_code}")
        try:
            items = response.json().get("items", [])
        except (json.JSONDecodeError, ValueError) as exc:
            raise ProviderError(self.provider_id, f"bad JSON payload: {exc}") from exc

        hits = []
        for rank, item in enumerate(items, start=1):
            url = item.get("link")
            if not url:
                continue
            hits.append(
                ProviderHit(
                    provider_id=self.provider_id,
                    url=url,
                    title=html.unescape(item.get("title", "")),
                    snippet=html.unescape(item.get("excerpt", "") or ""),
                    provider_rank=rank,
                    provider_meta={
                        "score": item.get("score", 0),
                        "answer_count": item.get("answer_count", 0),
                        "is_answered": item.get("is_answered", False),
                    },
                )
            )
        return hits


class GenericJsonProvider(SearchProvider):
    """Adapter for any JSON search endpoint via a small field mapping.

    options: query_param (default "q"), limit_param, items_path (dotted),
    url_field, title_field, snippet_field, extra_params, key_param.
    """

    def __init__(self, config: ProviderConfig, client: httpx.Client | None = None):
        super().__init__(config)
        self._client = client

    def _search(self, query_text: str) -> list[ProviderHit]:
        if not self.config.endpoint:
            raise ProviderError(self.provider_id, "no endpoint configured")
        opt = self.config.options
        params = dict(opt.get("extra_params", {}))
        params[opt.get("query_param", "q")] = query_text
        if opt.get("limit_param"):
            params[opt["limit_param"]] = self.config.per_provider_limit
        key = self.config.credential()
        if key and opt.get("key_param"):
            params[opt["key_param"]] = key

        client = self._client or _default_client()
        response = client.get(self.config.endpoint, params=params, timeout=self.config.timeout_s)
        if response.status_code != 200:
            raise ProviderError(self.provider_id, f"HTTP {response.status_code}")
        try:
            payload = response.json()
        except (json.JSONDecodeError, ValueError) as exc:
            raise ProviderError(self.provider_id, f"bad JSON payload: {exc}") from exc

        items = _dig(payload, opt.get("items_path", "items"))
        if not isinstance(items, list):
            raise ProviderError(self.provider_id, "items path did not yield a list")
        hits = []
        for rank, item in enumerate(items, start=1):
            url = item.get(opt.get("url_field", "url"))
            if not url:
                continue
            hits.append(
                ProviderHit(
                    provider_id=self.provider_id,
                    url=url,
                    title=str(item.get(opt.get("title_field", "title"), "") or ""),
                    snippet=str(item.get(opt.get("snippet_field", "snippet"), "") or ""),
                    provider_rank=rank,
                    provider_meta={},
                )
            )
        return hits


class FixtureProvider(SearchProvider):
    """Replays recorded hits from <fixtures_dir>/<provider_id>/<query-hash>.json.

    Falls back to default.json so scenario fixtures survive query-text drift.
    Every query is appended to call_log, which tests use to assert that
    disabled providers are never contacted.
    """

    def __init__(self, config: ProviderConfig, fixtures_dir: str | Path):
        super().__init__(config)
        self.fixtures_dir = Path(fixtures_dir)
        self.call_log: list[str] = []

    def _search(self, query_text: str) -> list[ProviderHit]:
        self.call_log.append(query_text)
        base = self.fixtures_dir / self.provider_id
        candidates = [base / f"{query_fingerprint(query_text)}.json", base / "default.json"]
        path = next((p for p in candidates if p.is_file()), None)
        if path is None:
            raise ProviderError(self.provider_id, f"no fixture for query {query_text!r}")
        payload = json.loads(path.read_text(encoding="utf-8"))
        if isinstance(payload, dict) and "error" in payload:
            raise ProviderError(self.provider_id, str(payload["error"]))
        rows = payload["hits"] if isinstance(payload, dict) else payload
        hits = []
        for i, row in enumerate(rows, start=1):
            hits.append(
                ProviderHit(
                    provider_id=self.provider_id,
                    url=row["url"],
                    title=row.get("title", ""),
                    snippet=row.get("snippet", ""),
                    provider_rank=int(row.get("rank", i)),
                    provider_meta=row.get("meta", {}),
                )
            )
        return hits


def stackexchange_search(
    query: Query | str, config: ProviderConfig, client: httpx.Client | None = None
) -> list[ProviderHit]:
    """One-shot StackExchange search (convenience wrapper over the provider)."""
    text = query.text if isinstance(query, Query) else query
    return StackExchangeProvider(config, client=client).search(text)


def build_provider(
    config: ProviderConfig,
    fixtures_dir: str | Path | None = None,
    client: httpx.Client | None = None,
) -> SearchProvider:
    if config.kind == "stackexchange":
        return StackExchangeProvider(config, client=client)
    if config.kind == "generic":
        return GenericJsonProvider(config, client=client)
    if config.kind == "fixture":
        root = config.options.get("fixtures_dir") or fixtures_dir
        if not root:
            raise ValueError(f"fixture provider {config.provider_id} needs a fixtures dir")
        return FixtureProvider(config, root)
    raise ValueError(f"unknown provider kind {config.kind!r}")


def providers_from_fixtures(fixtures_dir: str | Path, limit: int = DEFAULT_PER_PROVIDER_LIMIT):
    """One FixtureProvider per subdirectory of a fixtures tree."""
    root = Path(fixtures_dir)
    providers = []
    for sub in sorted(p for p in root.iterdir() if p.is_dir()):
        cfg = ProviderConfig(provider_id=sub.name, kind="fixture", per_provider_limit=limit)
        providers.append(FixtureProvider(cfg, root))
    return providers


_default_client_lock = threading.Lock()
_default_client_instance: httpx.Client | None = None


def _default_client() -> httpx.Client:
    global _default_client_instance
    with _default_client_lock:
        if _default_client_instance is None:
            proxy = os.environ.get("SURF_HTTP_PROXY") or None
            _default_client_instance = httpx.Client(proxy=proxy, follow_redirects=True)
        return _default_client_instance


def _dig(payload, dotted_path: str):
    node = payload
    for key in dotted_path.split("."):
        if not isinstance(node, dict):
            return None
        node = node.get(key)
    return node


# ── Response cache ───────────────────────────────────────────────────────────

class ResponseCache:
    """Thread-safe in-memory cache of provider responses for one process."""

    def __init__(self, max_entries: int = 256):
        self._lock = threading.Lock()
        self._data: dict[tuple[str, str], list[ProviderHit]] = {}
        self._max = max_entries

    def get(self, provider_id: str, query_text: str) -> list[ProviderHit] | None:
        with self._lock:
            return self._data.get((provider_id, query_text))

    def put(self, provider_id: str, query_text: str, hits: list[ProviderHit]) -> None:
        with self._lock:
            if len(self._data) >= self._max:
                self._data.pop(next(iter(self._data)))
            self._data[(provider_id, query_text)] = hits


# ── Fan-out and merge ────────────────────────────────────────────────────────

def search_all(
    query: Query | str,
    providers: list[SearchProvider],
    *,
    corpus_cap: int = DEFAULT_CORPUS_CAP,
    max_workers: int = DEFAULT_MAX_WORKERS,
    cache: ResponseCache | None = None,
) -> Corpus:
    """Query every enabled provider concurrently and merge hits into a corpus.

    Individual provider failures become warnings; the call only fails
    (AllProvidersFailed) when nothing at all came back.  Entry order is by
    best provider rank, then canonical URL.
    """
    text = query.text if isinstance(query, Query) else query
    enabled = [p for p in providers if p.config.enabled]
    if not enabled:
        raise AllProvidersFailed("no enabled providers")

    warnings: list[str] = []
    results: dict[str, list[ProviderHit]] = {}

    def run_one(provider: SearchProvider) -> list[ProviderHit]:
        if cache is not None:
            hit = cache.get(provider.provider_id, text)
            if hit is not None:
                return hit
        hits = provider.search(text)
        if cache is not None:
            cache.put(provider.provider_id, text, hits)
        return hits

    with ThreadPoolExecutor(max_workers=min(max_workers, len(enabled))) as pool:
        futures = {p.provider_id: pool.submit(run_one, p) for p in enabled}
        for provider_id, future in futures.items():
            try:
                results[provider_id] = future.result()
            except ProviderError as exc:
                warnings.append(str(exc))
            except Exception as exc:  # noqa: BLE001
                warnings.append(f"{provider_id}: {exc}")

    entries: dict[str, CorpusEntry] = {}
    for provider in enabled:  # deterministic merge order
        for hit in results.get(provider.provider_id, []):
            try:
                canon = canonicalize_url(hit.url)
            except InvalidUrl as exc:
                warnings.append(f"{provider.provider_id}: dropped hit ({exc})")
                continue
            entry = entries.get(canon)
            if entry is None:
                entries[canon] = CorpusEntry(canonical_url=canon, hits=[hit], best_title=hit.title)
            else:
                _merge_hit(entry, hit)

    merged = sorted(entries.values(), key=lambda e: (e.best_rank, e.canonical_url))
    if not merged:
        raise AllProvidersFailed("no provider returned any result")
    return Corpus(entries=merged[:corpus_cap], warnings=warnings, providers_active=len(enabled))


def _merge_hit(entry: CorpusEntry, hit: ProviderHit) -> None:
    # At most one hit per provider: keep the better-ranked duplicate.
    for i, existing in enumerate(entry.hits):
        if existing.provider_id == hit.provider_id:
            if hit.provider_rank < existing.provider_rank:
                entry.hits[i] = hit
            break
    else:
        entry.hits.append(hit)
    best = min(entry.hits, key=lambda h: (h.provider_rank, h.provider_id))
    entry.best_title = best.title
