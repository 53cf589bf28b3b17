"""Stack-trace detection, parsing, and token extraction.

Raw console text goes in, structured traces and candidate query tokens
come out.  Everything here is pure and thread-safe.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

from .errors import MalformedTrace

# ── Grammar ──────────────────────────────────────────────────────────────────

# Header: optional JVM thread prefix, fully-qualified type, optional ": message".
_HEADER_RE = re.compile(
    r'^\s*(?:Exception in thread "[^"]*"\s+)?'
    r"([A-Za-z_$][\w.$]*)"
    r"(?::\s*(.*?))?\s*$"
)

# Frame: "at fully.qualified.Class.method(Location)".
_FRAME_RE = re.compile(r"^\s+at\s+([\w$.<>]+)\.([\w$<>]+)\((.*)\)\s*$")

_CAUSED_BY_RE = re.compile(r"^\s*Caused by:\s+(.*)$")

# Frame-elision suffix the JVM prints inside cause segments.
_ELIDED_RE = re.compile(r"^\s*\.\.\.\s*\d+\s+more\s*$")

_LOCATION_RE = re.compile(r"^(.*):(\d+)$")

_NO_SOURCE = {"Unknown Source", "Native Method", ""}

# Splits camelCase and acronym runs: "checkForComodification" -> check/For/Comodification,
# "HTMLParser" -> HTML/Parser.
_CAMEL_RE = re.compile(r"[A-Z]+(?=[A-Z][a-z0-9])|[A-Z]?[a-z0-9]+|[A-Z]+|\d+")

_IDENTIFIER_RE = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*")

_WORD_RE = re.compile(r"[A-Za-z0-9_$]+")

# Method-name noise. "main" stays: the worked examples treat the entry point
# as a signal token, and it anchors the throw-site neighbourhood of user code.
_STOP_TOKENS = frozenset({"run", "invoke", "init", "clinit"})

_MIN_TOKEN_LEN = 3


# ── Language profiles ────────────────────────────────────────────────────────

@dataclass(frozen=True)
class LanguageProfile:
    """Keyword list used to filter identifiers out of context code."""

    name: str
    keywords: frozenset[str]


JAVA_PROFILE = LanguageProfile(
    name="java",
    keywords=frozenset(
        """
        abstract assert boolean break byte case catch char class const continue
        default do double else enum extends final finally float for goto if
        implements import instanceof int interface long native new package
        private protected public return short static strictfp super switch
        synchronized this throw throws transient try void volatile while
        true false null var record yield
        """.split()
    ),
)

PROFILES = {JAVA_PROFILE.name: JAVA_PROFILE}


# ── Domain types ─────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Frame:
    """One `at Class.method(Location)` entry; depth 0 is the throw site."""

    class_fq: str
    method: str
    file: str | None = None
    line: int | None = None
    depth: int = 0

    def __post_init__(self):
        if not self.class_fq or not self.method:
            raise ValueError("frame needs a class and a method")
        if self.line is not None and self.file is None:
            raise ValueError("line number without a file")


@dataclass(frozen=True)
class StackTrace:
    """Parsed exception: type, optional message, frames, chained cause."""

    exception_type: str
    message: str | None
    frames: tuple[Frame, ...]
    caused_by: "StackTrace | None" = None

    def __post_init__(self):
        if not self.exception_type:
            raise ValueError("exception type must be non-empty")
        if not self.frames:
            raise ValueError("a stack trace needs at least one frame")

    @property
    def exception_simple_name(self) -> str:
        """Innermost class name of the exception type."""
        return self.exception_type.split(".")[-1].split("$")[-1]

    def chain(self) -> list["StackTrace"]:
        """This trace followed by its flattened cause chain."""
        out: list[StackTrace] = []
        node: StackTrace | None = self
        while node is not None:
            out.append(node)
            node = node.caused_by
        return out


class TokenKind(Enum):
    EXCEPTION_TYPE = "exception"
    CLASS_NAME = "class"
    METHOD_NAME = "method"


@dataclass(frozen=True)
class Token:
    """Candidate query token with the shallowest frame depth it occurs at."""

    text: str
    kind: TokenKind
    min_depth: int


@dataclass(frozen=True)
class ContextCode:
    """Source under development plus its derived identifier multiset."""

    source_text: str
    identifier_bag: Counter = field(default_factory=Counter)

    @property
    def empty(self) -> bool:
        return not self.identifier_bag


@dataclass(frozen=True)
class TraceSpan:
    """Line range [start, end) of one detected trace, with the verbatim lines."""

    start: int
    end: int
    lines: tuple[str, ...]

    @property
    def text(self) -> str:
        return "\n".join(self.lines)


# ── Detection ────────────────────────────────────────────────────────────────

def detect_traces(text: str) -> list[TraceSpan]:
    """Find every maximal stack-trace span in arbitrary console/log text.

    A span is a header line followed by one or more frame lines, plus any
    trailing "Caused by:" segments.  Unmatched text yields no spans.
    """
    lines = text.splitlines()
    spans: list[TraceSpan] = []
    i = 0
    while i < len(lines):
        if _HEADER_RE.match(lines[i]) and i + 1 < len(lines) and _FRAME_RE.match(lines[i + 1]):
            j = i + 1
            while j < len(lines) and _FRAME_RE.match(lines[j]):
                j += 1
            if j < len(lines) and _ELIDED_RE.match(lines[j]):
                j += 1
            j = _consume_causes(lines, j)
            spans.append(TraceSpan(start=i, end=j, lines=tuple(lines[i:j])))
            i = j
        else:
            i += 1
    return spans


def _consume_causes(lines: list[str], j: int) -> int:
    while j < len(lines):
        m = _CAUSED_BY_RE.match(lines[j])
        if not (m and _HEADER_RE.match(m.group(1))):
            break
        k = j + 1
        body = 0
        while k < len(lines) and _FRAME_RE.match(lines[k]):
            k += 1
            body += 1
        if k < len(lines) and _ELIDED_RE.match(lines[k]):
            k += 1
            body += 1
        if body == 0:
            break
        j = k
    return j


# ── Parsing ──────────────────────────────────────────────────────────────────

def parse_trace(lines: list[str] | tuple[str, ...] | str) -> StackTrace:
    """Parse one detected span into a StackTrace.

    Raises MalformedTrace when the header or every frame line fails the grammar.
    """
    if isinstance(lines, str):
        lines = lines.splitlines()
    lines = [ln for ln in lines if ln.strip()]
    if not lines:
        raise MalformedTrace("empty input")

    header = _HEADER_RE.match(lines[0])
    if not header:
        raise MalformedTrace(f"unparseable header line: {lines[0]!r}")
    exception_type, message = header.group(1), header.group(2)
    if not message:
        message = None

    frame_lines: list[str] = []
    cause_lines: list[str] | None = None
    for idx, line in enumerate(lines[1:], start=1):
        m = _CAUSED_BY_RE.match(line)
        if m:
            cause_lines = [m.group(1)] + lines[idx + 1:]
            break
        frame_lines.append(line)

    frames: list[Frame] = []
    for line in frame_lines:
        m = _FRAME_RE.match(line)
        if not m:
            continue  # elision markers and stray noise
        file, lineno = _parse_location(m.group(3))
        frames.append(
            Frame(class_fq=m.group(1), method=m.group(2), file=file, line=lineno, depth=len(frames))
        )
    if not frames:
        raise MalformedTrace(f"no frame lines under header {exception_type!r}")

    caused_by = parse_trace(cause_lines) if cause_lines else None
    return StackTrace(
        exception_type=exception_type,
        message=message,
        frames=tuple(frames),
        caused_by=caused_by,
    )


def _parse_location(loc: str) -> tuple[str | None, int | None]:
    loc = loc.strip()
    if loc in _NO_SOURCE:
        return None, None
    m = _LOCATION_RE.match(loc)
    if m:
        lineno = int(m.group(2))
        if lineno > 0:
            return m.group(1), lineno
    return loc, None


def render(trace: StackTrace) -> str:
    """Canonical text form: header, tab-indented frames, recursive causes."""
    parts: list[str] = []
    node: StackTrace | None = trace
    prefix = ""
    while node is not None:
        head = node.exception_type
        if node.message:
            head += f": {node.message}"
        parts.append(prefix + head)
        for f in node.frames:
            if f.file and f.line is not None:
                loc = f"{f.file}:{f.line}"
            elif f.file:
                loc = f.file
            else:
                loc = "Unknown Source"
            parts.append(f"\tat {f.class_fq}.{f.method}({loc})")
        node = node.caused_by
        prefix = "Caused by: "
    return "\n".join(parts)


# ── Token extraction ─────────────────────────────────────────────────────────

def class_name_parts(class_fq: str) -> list[str]:
    """Simple-name parts of a fully-qualified class, outermost first.

    Package segments are dropped; the class segment splits on "$" so inner
    classes contribute each enclosing name ("a.b.C$D" -> ["C", "D"]).
    """
    cls = class_fq.split(".")[-1]
    return [p for p in cls.split("$") if p]


def _keep_token(text: str) -> bool:
    if len(text) < _MIN_TOKEN_LEN or text.isdigit():
        return False
    return text not in _STOP_TOKENS


def _method_token(method: str) -> str:
    return method.strip("<>")


def extract_tokens(trace: StackTrace) -> list[Token]:
    """Candidate query tokens for a trace and its flattened cause chain.

    Order is deterministic: exception name first, then per-frame class parts
    and method, first occurrence wins on kind, minimum depth wins on depth.
    """
    merged: dict[str, Token] = {}

    def add(text: str, kind: TokenKind, depth: int) -> None:
        if not _keep_token(text):
            return
        seen = merged.get(text)
        if seen is None:
            merged[text] = Token(text=text, kind=kind, min_depth=depth)
        elif depth < seen.min_depth:
            merged[text] = Token(text=seen.text, kind=seen.kind, min_depth=depth)

    for segment in trace.chain():
        for part in class_name_parts(segment.exception_type):
            add(part, TokenKind.EXCEPTION_TYPE, 0)
        for frame in segment.frames:
            for part in class_name_parts(frame.class_fq):
                add(part, TokenKind.CLASS_NAME, frame.depth)
            add(_method_token(frame.method), TokenKind.METHOD_NAME, frame.depth)
    return list(merged.values())


# ── Context-code tokenization ────────────────────────────────────────────────

def split_words(text: str) -> list[str]:
    """Lowercased camelCase/snake_case parts of every word-ish run in text."""
    parts: list[str] = []
    for word in _WORD_RE.findall(text):
        for chunk in re.split(r"[_$]+", word):
            for part in _CAMEL_RE.findall(chunk):
                parts.append(part.lower())
    return parts


def _identifier_parts(identifier: str) -> list[str]:
    parts: list[str] = []
    for chunk in re.split(r"[_$]+", identifier):
        parts.extend(p.lower() for p in _CAMEL_RE.findall(chunk))
    return parts


def tokenize_code(source_text: str, profile: LanguageProfile = JAVA_PROFILE) -> ContextCode:
    """Build the identifier multiset for a piece of context code.

    Extraction is lexical: identifier-shaped substrings are split on
    camelCase/snake_case boundaries, lowercased, and filtered against the
    language profile's keywords plus the length/numeric rules.
    """
    bag: Counter = Counter()
    for identifier in _IDENTIFIER_RE.findall(source_text):
        for part in _identifier_parts(identifier):
            if len(part) < _MIN_TOKEN_LEN or part.isdigit():
                continue
            if part in profile.keywords:
                continue
            bag[part] += 1
    return ContextCode(source_text=source_text, identifier_bag=bag)


def context_frequency(token_text: str, code: ContextCode) -> int:
    """Occurrences of a trace token in context code, summed over its split parts."""
    return sum(code.identifier_bag.get(part, 0) for part in _identifier_parts(token_text))
