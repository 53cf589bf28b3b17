"""Page fetching, HTML content extraction, and the on-disk page cache.

Extraction runs on the standard library HTML parser: we only need the
title, the visible text, and the text of code-bearing elements, and the
parser must never reject real-world tag soup outright.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from html.parser import HTMLParser
from pathlib import Path

import httpx

from .errors import FetchError

MAX_PAGE_BYTES = 2 * 1024 * 1024
DEFAULT_TTL_S = 7 * 24 * 3600
DEFAULT_FETCH_WORKERS = 8
DEFAULT_TIMEOUT_S = 10.0
MAX_REDIRECTS = 5

_CODE_TAGS = {"code", "pre", "blockquote"}
_SKIP_TAGS = {"script", "style"}
_VOID_TAGS = {
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
}


@dataclass
class PageContent:
    """Extracted text of one fetched page."""

    url: str
    title: str = ""
    body_text: str = ""
    code_blocks: list[str] = field(default_factory=list)
    fetched_at: float = 0.0
    ok: bool = True
    error: str = ""

    def to_dict(self) -> dict:
        return {
            "url": self.url,
            "title": self.title,
            "body_text": self.body_text,
            "code_blocks": list(self.code_blocks),
            "fetched_at": self.fetched_at,
            "ok": self.ok,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PageContent":
        return cls(
            url=data["url"],
            title=data.get("title", ""),
            body_text=data.get("body_text", ""),
            code_blocks=list(data.get("code_blocks", [])),
            fetched_at=float(data.get("fetched_at", 0.0)),
            ok=bool(data.get("ok", True)),
            error=data.get("error", ""),
        )


class _Extractor(HTMLParser):
    """Collects title, visible text, and outermost code-element text."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.title_parts: list[str] = []
        self.h1_parts: list[str] = []
        self.body_parts: list[str] = []
        self.code_blocks: list[str] = []
        self._code_parts: list[str] = []
        self._in_title = False
        self._in_h1 = False
        self._skip_depth = 0
        self._code_stack: list[str] = []

    def handle_starttag(self, tag, attrs):
        if tag in _VOID_TAGS:
            return
        if tag in _SKIP_TAGS:
            self._skip_depth += 1
        elif tag == "title":
            self._in_title = True
        elif tag == "h1":
            self._in_h1 = True
        elif tag in _CODE_TAGS:
            # Outermost element wins: <code> inside <pre> is one block.
            if not self._code_stack:
                self._code_parts = []
            self._code_stack.append(tag)

    def handle_endtag(self, tag):
        if tag in _SKIP_TAGS:
            self._skip_depth = max(0, self._skip_depth - 1)
        elif tag == "title":
            self._in_title = False
        elif tag == "h1":
            self._in_h1 = False
        elif tag in _CODE_TAGS and self._code_stack:
            # Tolerate mismatched nesting: pop the nearest matching tag.
            for i in range(len(self._code_stack) - 1, -1, -1):
                if self._code_stack[i] == tag:
                    del self._code_stack[i:]
                    break
            if not self._code_stack:
                text = "".join(self._code_parts).strip()
                if text:
                    self.code_blocks.append(text)
                self._code_parts = []

    def handle_data(self, data):
        if self._skip_depth:
            return
        if self._in_title:
            self.title_parts.append(data)
            return
        if self._code_stack:
            self._code_parts.append(data)
        self.body_parts.append(data)
        if self._in_h1:
            self.h1_parts.append(data)

    def close(self):
        super().close()
        if self._code_stack:
            text = "".join(self._code_parts).strip()
            if text:
                self.code_blocks.append(text)
            self._code_stack = []


def extract_content(html_text: str, url: str = "") -> PageContent:
    """Pull title, visible text, and code blocks out of an HTML document.

    Never raises on malformed markup: whatever the parser salvages before
    an internal fault is returned.
    """
    parser = _Extractor()
    try:
        parser.feed(html_text)
        parser.close()
    except Exception:  # noqa: BLE001 - keep whatever was parsed so far
        pass
    title = _collapse(" ".join(parser.title_parts))
    if not title:
        title = _collapse(" ".join(parser.h1_parts))
    return PageContent(
        url=url,
        title=title,
        body_text=_collapse(" ".join(parser.body_parts)),
        code_blocks=parser.code_blocks,
        fetched_at=time.time(),
    )


def _collapse(text: str) -> str:
    return " ".join(text.split())


class PageCache:
    """Content-addressed page store: <dir>/<hh>/<sha256(url)>.json.

    Writes go through a temp file and an atomic rename so a crashed
    process never leaves a truncated entry behind.
    """

    def __init__(self, cache_dir: str | Path, ttl_s: float = DEFAULT_TTL_S):
        self.cache_dir = Path(cache_dir)
        self.ttl_s = ttl_s

    def _path(self, url: str) -> Path:
        digest = hashlib.sha256(url.encode("utf-8")).hexdigest()
        return self.cache_dir / digest[:2] / f"{digest}.json"

    def get(self, url: str, now: float | None = None) -> PageContent | None:
        path = self._path(url)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            return None
        page = PageContent.from_dict(data)
        current = time.time() if now is None else now
        if current - page.fetched_at > self.ttl_s:
            return None
        return page

    def put(self, page: PageContent) -> None:
        path = self._path(page.url)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                json.dump(page.to_dict(), handle, ensure_ascii=False)
            os.replace(tmp_name, path)
        except BaseException:
            try:
                os.unlink(tmp_name)
            except OSError:
                pass
            raise


class PageSource:
    """Anything that turns a canonical URL into PageContent."""

    def fetch(self, url: str) -> PageContent:
        raise NotImplementedError

    def fetch_many(self, urls: list[str], max_workers: int = DEFAULT_FETCH_WORKERS):
        """Fetch URLs concurrently; failures become error-flagged pages."""
        pages: dict[str, PageContent] = {}
        if not urls:
            return pages
        with ThreadPoolExecutor(max_workers=min(max_workers, len(urls))) as pool:
            futures = {url: pool.submit(self.fetch, url) for url in urls}
            for url, future in futures.items():
                try:
                    pages[url] = future.result()
                except Exception as exc:  # noqa: BLE001
                    pages[url] = PageContent(url=url, ok=False, error=str(exc))
        return pages


class HttpPageSource(PageSource):
    """Fetches pages over HTTP with an optional on-disk cache."""

    def __init__(
        self,
        cache: PageCache | None = None,
        client: httpx.Client | None = None,
        timeout_s: float = DEFAULT_TIMEOUT_S,
    ):
        self.cache = cache
        self.timeout_s = timeout_s
        self._client = client

    def _get_client(self) -> httpx.Client:
        if self._client is None:
            proxy = os.environ.get("SURF_HTTP_PROXY") or None
            self._client = httpx.Client(
                proxy=proxy,
                follow_redirects=True,
                max_redirects=MAX_REDIRECTS,
                headers={"User-Agent": "surf-search/1.0"},
            )
        return self._client

    def fetch(self, url: str) -> PageContent:
        if self.cache is not None:
            cached = self.cache.get(url)
            if cached is not None:
                return cached
        page = fetch_page(url, client=self._get_client(), timeout_s=self.timeout_s)
        if self.cache is not None and page.ok:
            self.cache.put(page)
        return page


class FixturePageSource(PageSource):
    """Serves pages from a {url: html} mapping; unknown URLs yield errors.

    Keys are matched on canonical URL, so fixtures written against the raw
    provider URLs still resolve.
    """

    def __init__(self, pages_by_url: dict[str, str]):
        from .search import canonicalize_url

        self._pages: dict[str, str] = {}
        for url, html_text in pages_by_url.items():
            try:
                self._pages[canonicalize_url(url)] = html_text
            except Exception:  # noqa: BLE001 - keep raw key for odd fixtures
                self._pages[url] = html_text

    @classmethod
    def from_json_file(cls, path: str | Path) -> "FixturePageSource":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(data)

    def fetch(self, url: str) -> PageContent:
        from .search import canonicalize_url

        try:
            key = canonicalize_url(url)
        except Exception:  # noqa: BLE001
            key = url
        html_text = self._pages.get(key, self._pages.get(url))
        if html_text is None:
            raise FetchError(url, "no fixture page")
        page = extract_content(html_text, url=url)
        return page


def fetch_page(
    url: str,
    client: httpx.Client | None = None,
    timeout_s: float = DEFAULT_TIMEOUT_S,
) -> PageContent:
    """Download one page and extract its content.

    Bodies are truncated at 2 MiB before parsing; non-2xx statuses and
    transport errors raise FetchError.
    """
    own_client = client is None
    if own_client:
        proxy = os.environ.get("SURF_HTTP_PROXY") or None
        client = httpx.Client(proxy=proxy, follow_redirects=True, max_redirects=MAX_REDIRECTS)
    try:
        try:
            with client.stream("GET", url, timeout=timeout_s) as response:
                if response.status_code < 200 or response.status_code >= 300:
                    raise FetchError(url, f"HTTP {response.status_code}")
                raw = bytearray()
                for chunk in response.iter_bytes():
                    raw.extend(chunk)
                    if len(raw) >= MAX_PAGE_BYTES:
                        del raw[MAX_PAGE_BYTES:]
                        break
                encoding = response.encoding or "utf-8"
        except httpx.HTTPError as exc:
            raise FetchError(url, str(exc)) from exc
        html_text = bytes(raw).decode(encoding, errors="replace")
        return extract_content(html_text, url=url)
    finally:
        if own_client:
            client.close()
