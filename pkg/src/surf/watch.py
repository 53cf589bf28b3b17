"""Proactive mode: detect stack traces in a growing stream of text.

The scanner is push-based so it survives arbitrary write chunking: feed
it bytes as they arrive and it emits an event only once a complete trace
has been seen.  Identical traces within a debounce window collapse into
one event.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .errors import EmptyTokenSet, MalformedTrace
from .graph import token_scores
from .query import Query, formulate_queries
from .trace import (
    _CAUSED_BY_RE,
    _ELIDED_RE,
    _FRAME_RE,
    _HEADER_RE,
    StackTrace,
    parse_trace,
    render,
)

DEFAULT_DEBOUNCE_S = 10.0


@dataclass(frozen=True)
class WatchEvent:
    trace: StackTrace
    query: Query
    timestamp: float
    source_id: str

    def to_dict(self) -> dict:
        return {
            "exception": self.trace.exception_type,
            "query": {
                "text": self.query.text,
                "score": round(self.query.score, 6),
                "tokens": list(self.query.tokens),
            },
            "timestamp": self.timestamp,
            "source": self.source_id,
        }


def query_for_trace(trace: StackTrace) -> Query:
    """Top recommended query for a trace; bare exception name as a last resort."""
    try:
        scores = token_scores(trace)
        return formulate_queries(scores, trace.exception_simple_name)[0]
    except EmptyTokenSet:
        return Query.keyword(trace.exception_simple_name)


class StreamScanner:
    """Incremental trace detector over a chunked text stream.

    A header line opens a candidate; the candidate only becomes a trace
    once at least one frame follows.  Any other line closes the current
    candidate, so partial traces never produce events.
    """

    def __init__(
        self,
        *,
        source_id: str = "stream",
        debounce_s: float = DEFAULT_DEBOUNCE_S,
        clock=time.monotonic,
    ):
        self.source_id = source_id
        self.debounce_s = debounce_s
        self._clock = clock
        self._tail = ""
        self._header: str | None = None
        self._frames: list[str] = []
        self._last_emit: dict[str, float] = {}

    def feed(self, chunk: str) -> list[WatchEvent]:
        events: list[WatchEvent] = []
        text = self._tail + chunk
        lines = text.split("\n")
        self._tail = lines.pop()
        for raw in lines:
            events.extend(self._handle_line(raw.rstrip("\r")))
        return events

    def flush(self) -> list[WatchEvent]:
        """Signal end of stream: the tail counts as a final complete line."""
        events: list[WatchEvent] = []
        if self._tail:
            line, self._tail = self._tail, ""
            events.extend(self._handle_line(line.rstrip("\r")))
        events.extend(self._finalize())
        return events

    def _handle_line(self, line: str) -> list[WatchEvent]:
        collecting = self._header is not None and bool(self._frames)
        if collecting and (
            _FRAME_RE.match(line) or _CAUSED_BY_RE.match(line) or _ELIDED_RE.match(line)
        ):
            self._frames.append(line)
            return []
        if self._header is not None and not self._frames and _FRAME_RE.match(line):
            self._frames.append(line)
            return []

        events = self._finalize()
        if line.strip() and _HEADER_RE.match(line):
            self._header = line
        return events

    def _finalize(self) -> list[WatchEvent]:
        header, frames = self._header, self._frames
        self._header, self._frames = None, []
        if header is None or not frames:
            return []
        try:
            trace = parse_trace([header, *frames])
        except MalformedTrace:
            return []
        return self._emit(trace)

    def _emit(self, trace: StackTrace) -> list[WatchEvent]:
        key = render(trace)
        now = self._clock()
        last = self._last_emit.get(key)
        if last is not None and now - last < self.debounce_s:
            return []
        self._last_emit[key] = now
        return [
            WatchEvent(
                trace=trace,
                query=query_for_trace(trace),
                timestamp=now,
                source_id=self.source_id,
            )
        ]


def watch_chunks(
    chunks,
    *,
    source_id: str = "stream",
    debounce_s: float = DEFAULT_DEBOUNCE_S,
    clock=time.monotonic,
):
    """Generator over WatchEvents for an iterable of text chunks."""
    scanner = StreamScanner(source_id=source_id, debounce_s=debounce_s, clock=clock)
    for chunk in chunks:
        yield from scanner.feed(chunk)
    yield from scanner.flush()


def follow_file(
    path,
    *,
    from_start: bool = False,
    poll_s: float = 0.5,
    debounce_s: float = DEFAULT_DEBOUNCE_S,
    stop=None,
):
    """Tail a file (new content only unless from_start) and yield events.

    `stop` is an optional zero-argument callable checked between polls so
    callers can end the loop.
    """
    scanner = StreamScanner(source_id=str(path), debounce_s=debounce_s)
    with open(path, "r", encoding="utf-8", errors="replace") as handle:
        if not from_start:
            handle.seek(0, 2)
        while True:
            chunk = handle.read()
            if chunk:
                yield from scanner.feed(chunk)
            elif stop is not None and stop():
                yield from scanner.flush()
                return
            else:
                time.sleep(poll_s)


def watch_stdin(*, debounce_s: float = DEFAULT_DEBOUNCE_S):
    """Yield events from standard input until EOF."""
    import sys

    scanner = StreamScanner(source_id="stdin", debounce_s=debounce_s)
    for line in sys.stdin:
        yield from scanner.feed(line)
    yield from scanner.flush()
